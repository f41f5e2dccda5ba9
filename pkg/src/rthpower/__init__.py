"""Operation-unit power models, intensity blending and race-to-halt decisions for multicore chips."""

from .errors import (
    ConfigurationError,
    CoreRangeError,
    DomainError,
    FitError,
    MetadataError,
    ParseError,
    RthPowerError,
    UnknownOperationError,
)
from .fitting import (
    BetaFactor,
    FitBounds,
    FitResult,
    MeasurementRecord,
    UnitFit,
    benchmark_mix,
    calibrate_beta,
    compute_beta,
    default_bounds,
    fit_intensity_params,
    fit_static_active,
    improved_power,
)
from .framework import (
    ApplicationMeta,
    CurvePoint,
    IntensityLaw,
    RthDecision,
    amdahl_speedup,
    best_core_count,
    energy,
    energy_saving,
    power_up,
    predict_energy_curve,
    predicted_power,
    rth_decide,
    speed_up,
)
from .model import (
    IntensityParams,
    OperationKind,
    OpMix,
    PlatformProfile,
    WorkloadCounts,
    app_power,
    comp_data_power,
    comp_power,
    data_power,
    operational_intensity,
    percentage_error,
    units_power,
)
from .tsk import IntensityGrid, memberships, tsk_power

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "CoreRangeError",
    "DomainError",
    "FitError",
    "MetadataError",
    "ParseError",
    "RthPowerError",
    "UnknownOperationError",
    "BetaFactor",
    "FitBounds",
    "FitResult",
    "MeasurementRecord",
    "UnitFit",
    "benchmark_mix",
    "calibrate_beta",
    "compute_beta",
    "default_bounds",
    "fit_intensity_params",
    "fit_static_active",
    "improved_power",
    "ApplicationMeta",
    "CurvePoint",
    "IntensityLaw",
    "RthDecision",
    "amdahl_speedup",
    "best_core_count",
    "energy",
    "energy_saving",
    "power_up",
    "predict_energy_curve",
    "predicted_power",
    "rth_decide",
    "speed_up",
    "IntensityParams",
    "OperationKind",
    "OpMix",
    "PlatformProfile",
    "WorkloadCounts",
    "app_power",
    "comp_data_power",
    "comp_power",
    "data_power",
    "operational_intensity",
    "percentage_error",
    "units_power",
    "IntensityGrid",
    "memberships",
    "tsk_power",
]
