"""Estimating platform and application parameters from power measurements.

Three estimators live here:

* :func:`fit_static_active` -- linear least squares for the static power,
  the per-core active power and the per-operation dynamic powers, from
  operation-unit micro-benchmarks run on several core counts.
* :func:`fit_intensity_params` -- bounded nonlinear least squares for the
  time ratio, the memory-parallel core count and the contention power at
  one operational intensity.
* :func:`compute_beta` -- the multiplicative online-learning correction.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import least_squares

from .errors import DomainError, FitError
from .model import IntensityParams, OpMix, PlatformProfile, app_power_array, percentage_error

log = logging.getLogger(__name__)

# benchmark-name tokens that are not operation names themselves
BENCHMARK_ALIASES: dict[str, tuple[str, ...]] = {
    "IDLE": (),
    "LOAD": ("LSULOAD",),
    "STORE": ("LSUSTORE",),
    "DUALLOAD": ("LSULOAD", "LSULOAD"),
    "DUALSTORE": ("LSUSTORE", "LSUSTORE"),
}


@dataclass(frozen=True)
class MeasurementRecord:
    benchmark: str
    intensity: float | None
    cores: int
    power: float
    time: float | None = None

    def __post_init__(self):
        if not self.benchmark:
            raise ValueError("benchmark name must be non-empty")
        if not self.power > 0:
            raise ValueError(f"power must be > 0, got {self.power}")
        if int(self.cores) != self.cores or self.cores < 1:
            raise ValueError(f"cores must be a positive integer, got {self.cores}")
        if self.intensity is not None and not self.intensity > 0:
            raise ValueError(f"intensity must be > 0, got {self.intensity}")
        if self.time is not None and self.time < 0:
            raise ValueError(f"time must be >= 0, got {self.time}")


@dataclass(frozen=True)
class FitResult:
    params: IntensityParams
    residual_rms: float
    per_point_pe: tuple[float, ...]


@dataclass(frozen=True)
class UnitFit:
    """Result of :func:`fit_static_active`."""

    p_static: float
    p_active: float
    dynamic: dict[str, float]
    clamped: tuple[str, ...] = ()
    residual_rms: float = 0.0
    per_point_pe: tuple[float, ...] = ()

    def to_profile(self, *, p_lsu: float | None = None, max_cores: int = 8) -> PlatformProfile:
        if p_lsu is None:
            p_lsu = self.dynamic.get("LSULOAD", 28.0)
        return PlatformProfile.from_table(
            self.p_static, self.p_active, self.dynamic, p_lsu=p_lsu, max_cores=max_cores
        )


@dataclass(frozen=True)
class BetaFactor:
    """Online-learning correction for one core-count configuration."""

    configuration: int | None
    beta: float
    mean_pe: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")


def benchmark_mix(name: str) -> OpMix:
    """Operation mix of a unit micro-benchmark, decoded from its name.

    Units are joined with ``-`` (``SAUXOR-CMUCPSS``); ``IDLE`` has no units
    and ``DUALLOAD`` drives both load units.
    """
    ops: list[str] = []
    for token in name.replace("+", "-").split("-"):
        token = token.strip().upper()
        if not token:
            continue
        ops.extend(BENCHMARK_ALIASES.get(token, (token,)))
    return OpMix(ops)


# --------------------------------------------------------------------------
# static / active / dynamic powers


def fit_static_active(
    records: Iterable[MeasurementRecord],
    *,
    fixed: Mapping[str, float] | None = None,
) -> UnitFit:
    """Jointly regress ``power = P_sta + n * (P_act + sum P_dyn)`` over benchmarks.

    The static and active powers are shared by every benchmark; each
    operation unit gets its own dynamic power. Benchmark names are decoded
    with :func:`benchmark_mix`. The active power is only separable from the
    dynamic powers when the suite contains an ``IDLE`` benchmark or
    benchmarks combining several units.

    Parameters
    ----------
    records : iterable of MeasurementRecord
    fixed : mapping, optional
        Operation powers taken as known instead of fitted.

    Returns
    -------
    UnitFit
        Non-negative estimates. Parameters that came out negative are pinned
        at zero, the rest re-solved, and their names listed in ``clamped``.

    Raises
    ------
    FitError
        When the system is underdetermined or a benchmark was run on fewer
        than two core counts.
    """
    records = list(records)
    fixed = dict(fixed or {})
    if not records:
        raise FitError("no measurement records")

    cores_by_bench: dict[str, set[int]] = defaultdict(set)
    for rec in records:
        cores_by_bench[rec.benchmark].add(int(rec.cores))
    thin = sorted(b for b, cs in cores_by_bench.items() if len(cs) < 2)
    if thin:
        raise FitError(
            "each benchmark needs at least 2 distinct core counts; "
            f"only one for: {', '.join(thin)}"
        )

    counts = [Counter(benchmark_mix(rec.benchmark).ops) for rec in records]
    free_ops = sorted({op for c in counts for op in c} - set(fixed))
    names = ["p_static", "p_active"] + free_ops

    A = np.zeros((len(records), len(names)))
    y = np.empty(len(records))
    for i, (rec, c) in enumerate(zip(records, counts)):
        n = float(rec.cores)
        A[i, 0] = 1.0
        A[i, 1] = n
        for j, op in enumerate(free_ops, start=2):
            A[i, j] = n * c.get(op, 0)
        y[i] = rec.power - n * sum(fixed[op] * k for op, k in c.items() if op in fixed)

    if len(records) < len(names):
        raise FitError(
            f"underdetermined: {len(records)} equations for {len(names)} unknowns "
            f"(deficit {len(names) - len(records)})"
        )
    rank = np.linalg.matrix_rank(A)
    if rank < len(names):
        raise FitError(
            f"underdetermined: design matrix has rank {rank} for {len(names)} unknowns "
            f"(deficit {len(names) - rank}); the active power cannot be separated "
            "from the dynamic powers without an IDLE or multi-unit benchmark"
        )

    active = list(range(len(names)))
    clamped: list[str] = []
    x = np.zeros(len(names))
    while True:
        sol, *_ = np.linalg.lstsq(A[:, active], y, rcond=None)
        x[:] = 0.0
        x[active] = sol
        negative = [j for j in active if x[j] < 0]
        if not negative:
            break
        # pin the most negative parameter and re-solve the rest
        worst = min(negative, key=lambda j: x[j])
        clamped.append(names[worst])
        active.remove(worst)
        x[worst] = 0.0
        if not active:
            break
    if clamped:
        log.warning("clamped to zero: %s", ", ".join(clamped))

    fitted = A @ x
    resid = y - fitted
    estimates = np.array(
        [rec.power - (y[i] - fitted[i]) for i, rec in enumerate(records)]
    )
    dynamic = {op: float(x[j]) for j, op in enumerate(free_ops, start=2)}
    dynamic.update({op: float(v) for op, v in fixed.items()})
    return UnitFit(
        p_static=float(x[0]),
        p_active=float(x[1]),
        dynamic=dict(sorted(dynamic.items())),
        clamped=tuple(clamped),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        per_point_pe=tuple(
            percentage_error(rec.power, est) for rec, est in zip(records, estimates)
        ),
    )


# --------------------------------------------------------------------------
# per-intensity parameters


@dataclass(frozen=True)
class FitBounds:
    alpha_max: float
    m_max: float
    p_ctn_max: float


def default_bounds(profile: PlatformProfile, grid_intensities: Sequence[float]) -> FitBounds:
    """``alpha <= 16 * max(I)``; contention never above a fully busy core."""
    top_op = max((op.dynamic_power for op in profile.op_table), default=0.0)
    return FitBounds(
        alpha_max=16.0 * max(grid_intensities),
        m_max=float(profile.max_cores),
        p_ctn_max=profile.p_active + profile.p_lsu + top_op,
    )


# starting points straddle the memory-/compute-bound switch at alpha == I
_ALPHA_START_FACTORS = (0.3, 0.7, 0.95, 1.05, 1.5, 4.0)
_P_CTN_START_FRACTION = 0.3


def _start_grid(intensity: float, bounds: FitBounds) -> list[tuple[float, float, float]]:
    alphas = sorted({min(f * intensity, bounds.alpha_max) for f in _ALPHA_START_FACTORS})
    ms = sorted({min(1.0, bounds.m_max), 0.5 * bounds.m_max})
    return list(itertools.product(alphas, ms, [_P_CTN_START_FRACTION * bounds.p_ctn_max]))


def fit_intensity_params(
    profile: PlatformProfile,
    mix,
    intensity: float,
    records: Iterable[MeasurementRecord],
    *,
    bounds: FitBounds | None = None,
    max_nfev: int = 400,
) -> FitResult:
    """Fit ``(alpha, m, p_ctn)`` at one operational intensity.

    Minimises the squared gap between measured powers and the application
    power model over the records' core counts, within box bounds. The
    memory-bound / compute-bound switch at ``intensity == alpha`` makes the
    objective kinked, so a local trust-region solver is restarted from a
    fixed grid of starting points on both sides of the switch.

    Equal-residual solutions are common (data from a memory-bound
    application can often be reproduced exactly by a compute-bound one);
    among them the smallest ``alpha``, then the smallest ``p_ctn``, then the
    smallest ``m`` is returned.

    Raises
    ------
    FitError
        Fewer than three distinct core counts, or no start converged within
        ``max_nfev`` evaluations (``best`` holds the best parameters seen).
    """
    records = list(records)
    if not intensity > 0:
        raise DomainError(f"intensity must be > 0, got {intensity}")
    mix = mix if isinstance(mix, OpMix) else OpMix(mix)
    dyn = profile.mix_power(mix)
    cores = np.array([int(r.cores) for r in records], dtype=float)
    power = np.array([r.power for r in records], dtype=float)
    distinct = sorted(set(int(c) for c in cores))
    if len(distinct) < 3:
        raise FitError(
            f"underdetermined: {len(distinct)} distinct core count(s) for 3 unknowns "
            "(alpha, m, p_ctn)"
        )
    if max(distinct) > profile.max_cores:
        raise FitError(f"record core count {max(distinct)} exceeds max_cores {profile.max_cores}")
    if bounds is None:
        bounds = default_bounds(profile, [intensity])

    consts = (profile.p_static, profile.p_active, profile.p_lsu, dyn)
    scale = float(np.mean(power))  # constant; does not move the minimiser

    def residual(theta):
        alpha, m, p_ctn = theta
        model = app_power_array(*consts, alpha, m, p_ctn, intensity, cores)
        return (model - power) / scale

    lower = np.array([1e-9 * bounds.alpha_max, 0.0, 0.0])
    upper = np.array([bounds.alpha_max, bounds.m_max, bounds.p_ctn_max])

    solutions = []
    for start in _start_grid(intensity, bounds):
        x0 = np.clip(np.array(start), lower, upper)
        sol = least_squares(
            residual,
            x0,
            bounds=(lower, upper),
            method="trf",
            x_scale=upper - lower,
            xtol=1e-12,
            ftol=1e-14,
            gtol=1e-14,
            max_nfev=max_nfev,
        )
        solutions.append((float(np.sum(sol.fun**2)), sol.status > 0, tuple(sol.x)))

    best_cost = min(cost for cost, _, _ in solutions)
    best_any = min(solutions, key=lambda s: s[0])
    converged = [s for s in solutions if s[1]]
    if not converged:
        a, m, c = best_any[2]
        raise FitError(
            f"no start converged within {max_nfev} evaluations at I={intensity}",
            best=IntensityParams(intensity, a, m, c),
        )
    tol = 1e-10 + 1e-8 * best_cost
    tied = [s for s in converged if s[0] <= best_cost + tol]
    if not tied:
        tied = [min(converged, key=lambda s: s[0])]
    alpha, m, p_ctn = min(
        (s[2] for s in tied), key=lambda x: (round(x[0], 9), round(x[2], 9), round(x[1], 9))
    )
    params = IntensityParams(float(intensity), float(alpha), float(m), float(p_ctn))
    model = app_power_array(*consts, alpha, m, p_ctn, intensity, cores)
    return FitResult(
        params=params,
        residual_rms=float(np.sqrt(np.mean((power - model) ** 2))),
        per_point_pe=tuple(percentage_error(p, e) for p, e in zip(power, model)),
    )


# --------------------------------------------------------------------------
# online-learning correction


def compute_beta(pe_samples: Sequence[float], configuration: int | None = None) -> BetaFactor:
    """Correction factor ``1 / (1 + mean PE)``.

    ``pe_samples`` are the model's relative deviations from measurement,
    ``(estimate - measurement) / measurement``, so that multiplying the model
    by beta cancels the average deviation. :func:`calibrate_beta` builds
    them from paired powers.
    """
    pe_samples = list(pe_samples)
    if not pe_samples:
        raise DomainError("beta needs at least one percentage-error sample")
    mean_pe = math.fsum(pe_samples) / len(pe_samples)
    if not mean_pe > -1:
        raise DomainError(f"beta undefined for mean percentage error {mean_pe} <= -1")
    return BetaFactor(configuration, 1.0 / (1.0 + mean_pe), mean_pe)


def calibrate_beta(
    measured: Sequence[float],
    estimated: Sequence[float],
    configuration: int | None = None,
) -> BetaFactor:
    """Beta from sample executions with known measured and modelled power."""
    if len(measured) != len(estimated):
        raise ValueError("measured and estimated must have equal length")
    deviations = [-percentage_error(m, e) for m, e in zip(measured, estimated)]
    return compute_beta(deviations, configuration)


def improved_power(raw: float, beta: BetaFactor | float) -> float:
    if raw < 0:
        raise DomainError(f"power must be >= 0, got {raw}")
    factor = beta.beta if isinstance(beta, BetaFactor) else float(beta)
    return raw * factor
