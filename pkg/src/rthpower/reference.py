"""Bundled Myriad1 reference data and the application metadata built from it.

The tables under ``data/myriad1`` are published characterisation numbers:
operation-unit powers, micro-benchmark speed-ups and energies, kernel energy
savings and model errors.  ``data/myriad1.toml`` is the platform file fitted
from them (see :func:`build_platform_file`), and ``data/apps`` holds the
application metadata of :func:`reference_apps` in file form.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .fitting import (
    BetaFactor,
    MeasurementRecord,
    calibrate_beta,
    compute_beta,
    default_bounds,
    fit_intensity_params,
)
from .framework import ApplicationMeta, IntensityLaw
from .io import PlatformFile, read_app_meta, read_platform, read_table
from .model import OpMix, PlatformProfile, app_power
from .tsk import MYRIAD1_GRID_INTENSITIES, IntensityGrid

P_STATIC = 62.125
P_ACTIVE = 30.0
CORE_COUNTS = (1, 2, 4, 8)

# operation mixes assumed for the kernels; only the micro-benchmark mix is published
KERNEL_MIX = {"matmul": ("SAUMUL",), "spmv": ("SAUMUL",), "bfs": ("IAUXOR",)}
KERNEL_INTENSITY = {"matmul": IntensityLaw(1 / 8, 1.0), "spmv": 0.25, "bfs": 0.257}
MICRO_COLUMNS = {"micro_100": ("speedup_100_parallel", "p100"),
                 "micro_60": ("speedup_60_parallel", "p60"),
                 "micro_small": ("speedup_small_size", "small")}


def data_path(*parts: str) -> Path:
    return Path(resources.files("rthpower")).joinpath("data", *parts)


def table(name: str) -> list[dict[str, str]]:
    return read_table(data_path("myriad1", name))


def reference_profile(max_cores: int = 8) -> PlatformProfile:
    """Published static, active and per-operation powers of Myriad1."""
    ops = {row["op"]: float(row["dynamic_power_mw"]) for row in table("op_dynamic_power.csv")}
    return PlatformProfile.from_table(P_STATIC, P_ACTIVE, ops, p_lsu=ops["LSULOAD"], max_cores=max_cores)


def unit_suite_benchmarks() -> list[str]:
    text = data_path("myriad1", "unit_suite_benchmarks.txt").read_text(encoding="utf-8")
    return [line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")]


def intensity_suite_records() -> list[MeasurementRecord]:
    return [
        MeasurementRecord(r["benchmark"], float(r["intensity"]), int(r["cores"]), float(r["power_mw"]))
        for r in table("intensity_suite_i025.csv")
    ]


def build_platform_file() -> PlatformFile:
    """Fit the intensity grid and the per-configuration betas from the bundled tables."""
    profile = reference_profile()
    records = intensity_suite_records()
    mix = OpMix(["SAUXOR"])
    bounds = default_bounds(profile, MYRIAD1_GRID_INTENSITIES)
    fit = fit_intensity_params(profile, mix, records[0].intensity, records, bounds=bounds)
    betas = {}
    for n in (1, profile.max_cores):
        recs = [r for r in records if r.cores == n]
        est = [app_power(profile, fit.params, mix, r.intensity, n) for r in recs]
        betas[n] = calibrate_beta([r.power for r in recs], est, n)
    return PlatformFile(
        profile=profile,
        grid=IntensityGrid([fit.params]),
        betas=betas,
        residuals={fit.params.intensity: fit.residual_rms},
        name="myriad1",
    )


def load_platform() -> PlatformFile:
    """The bundled, pre-fitted Myriad1 platform file."""
    return read_platform(data_path("myriad1.toml"))


def kernel_betas(kernel: str) -> dict[int, BetaFactor]:
    return {
        int(r["cores"]): compute_beta([float(r["mean_pe"])], int(r["cores"]))
        for r in table("kernel_betas.csv")
        if r["kernel"] == kernel
    }


def micro_apps(platform: PlatformFile | None = None) -> dict[str, ApplicationMeta]:
    """The three intensity-0.25 micro-benchmarks with measured speed-ups and energies."""
    betas = dict((platform or load_platform()).betas)
    speed = table("micro_speedup_powerup.csv")
    en = table("micro_energy.csv")
    apps = {}
    for name, (s_col, e_col) in MICRO_COLUMNS.items():
        apps[name] = ApplicationMeta(
            name=name,
            intensity=0.25,
            mix=OpMix(["SAUXOR"]),
            speedup_samples={int(r["cores"]): float(r[s_col]) for r in speed},
            energy_samples={int(r["cores"]): float(r[f"{e_col}_measured"]) for r in en},
            betas=betas,
        )
    return apps


def kernel_apps() -> dict[str, ApplicationMeta]:
    """Kernel configurations with energies normalised to 100 on one core.

    Only energy savings are published for the kernels, so the 8-core energy
    is ``100 * (1 - ES)``.
    """
    apps = {}
    for kernel, key in (("matmul", "size"), ("spmv", "size"), ("bfs", "scale")):
        betas = kernel_betas(kernel)
        for row in table(f"{kernel}_energy_saving.csv"):
            size = int(row[key])
            law = KERNEL_INTENSITY[kernel]
            intensity = law(size) if isinstance(law, IntensityLaw) else law
            es = float(row["measured_pct"]) / 100.0
            name = f"{kernel}_{size}"
            apps[name] = ApplicationMeta(
                name=name,
                intensity=intensity,
                mix=OpMix(KERNEL_MIX[kernel]),
                energy_samples={1: 100.0, 8: 100.0 * (1.0 - es)},
                betas=betas,
            )
    return apps


def reference_apps(platform: PlatformFile | None = None) -> dict[str, ApplicationMeta]:
    return {**micro_apps(platform), **kernel_apps()}


def bundled_app(name: str) -> ApplicationMeta:
    return read_app_meta(data_path("apps", f"{name}.toml"))
