"""Race-to-halt decision framework.

Running on ``n`` cores instead of one changes energy by the factor
``power_up / speed_up``: power rises by ``P(n) / P(1)`` while run time falls
by the speed-up.  Race-to-halt (use every core, then idle) saves energy
exactly when the speed-up exceeds the power-up.  Power-up comes from the
blended power model (optionally beta-corrected per core configuration);
speed-up comes from measurements, from Amdahl's bound on a known parallel
fraction, or is implied by measured energies of the two configurations.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, MetadataError
from .fitting import BetaFactor, improved_power
from .model import OpMix, PlatformProfile
from .tsk import IntensityGrid, tsk_power


@dataclass(frozen=True)
class IntensityLaw:
    """Intensity that scales with problem size: ``coefficient * size ** exponent``.

    Dense matrix multiplication of order ``s`` has ``IntensityLaw(1/8, 1)``.
    """

    coefficient: float
    exponent: float = 0.0

    def __call__(self, size: float | None = None) -> float:
        if self.exponent == 0:
            return self.coefficient
        if size is None:
            raise MetadataError("intensity depends on problem size; pass a size")
        return self.coefficient * float(size) ** self.exponent


@dataclass(frozen=True)
class ApplicationMeta:
    name: str
    intensity: float | IntensityLaw
    mix: OpMix = field(default_factory=OpMix)
    speedup_samples: Mapping[int, float] = field(default_factory=dict)
    parallel_fraction: float | None = None
    betas: Mapping[int, BetaFactor] = field(default_factory=dict)
    energy_samples: Mapping[int, float] = field(default_factory=dict)
    baseline_time: float | None = None

    def __post_init__(self):
        if not isinstance(self.mix, OpMix):
            object.__setattr__(self, "mix", OpMix(self.mix))
        for n, s in self.speedup_samples.items():
            if not s > 0:
                raise ValueError(f"{self.name}: speed-up at {n} cores must be > 0, got {s}")
        if 1 in self.speedup_samples and self.speedup_samples[1] != 1:
            raise ValueError(f"{self.name}: speed-up on 1 core must be 1, got {self.speedup_samples[1]}")
        if self.parallel_fraction is not None and not 0 <= self.parallel_fraction <= 1:
            raise ValueError(f"{self.name}: parallel fraction must lie in [0, 1]")
        for n, e in self.energy_samples.items():
            if not e > 0:
                raise ValueError(f"{self.name}: energy at {n} cores must be > 0, got {e}")
        if self.baseline_time is not None and not self.baseline_time > 0:
            raise ValueError(f"{self.name}: baseline time must be > 0")

    def intensity_at(self, size: float | None = None) -> float:
        if isinstance(self.intensity, IntensityLaw):
            return self.intensity(size)
        return float(self.intensity)


@dataclass(frozen=True)
class RthDecision:
    use_rth: bool
    n_max: int
    power_up: float
    speed_up: float
    energy_saving: float
    speedup_source: str
    predicted_e1: float | None = None
    predicted_en: float | None = None

    @property
    def verdict(self) -> str:
        return "use RTH" if self.use_rth else "do not use RTH"


@dataclass(frozen=True)
class CurvePoint:
    cores: int
    power: float
    time: float
    energy: float


def amdahl_speedup(p: float, n: int) -> float:
    """Upper bound on speed-up of a program with parallel fraction ``p`` on ``n`` cores."""
    if not 0 <= p <= 1:
        raise DomainError(f"parallel fraction must lie in [0, 1], got {p}")
    if n < 1:
        raise DomainError(f"core count must be >= 1, got {n}")
    return 1.0 / ((1.0 - p) + p / n)


def energy(power: float, time: float) -> float:
    """Energy in mJ of drawing ``power`` mW for ``time`` s."""
    if power < 0 or time < 0:
        raise DomainError("power and time must be non-negative")
    return power * time


def energy_saving(e_1core: float, e_ncore: float) -> float:
    """Fraction of the single-core energy saved by running on more cores."""
    if e_1core == 0:
        raise DomainError("energy saving undefined for zero single-core energy")
    return (e_1core - e_ncore) / e_1core


def predicted_power(
    profile: PlatformProfile,
    grid: IntensityGrid,
    meta: ApplicationMeta,
    n: int,
    size: float | None = None,
) -> float:
    """Beta-corrected blended power of ``meta`` on ``n`` cores (beta defaults to 1)."""
    raw = tsk_power(profile, grid, meta.mix, meta.intensity_at(size), n)
    beta = meta.betas.get(n)
    return raw if beta is None else improved_power(raw, beta)


def power_up(
    profile: PlatformProfile,
    grid: IntensityGrid,
    meta: ApplicationMeta,
    n: int,
    size: float | None = None,
) -> float:
    if n < 1:
        raise DomainError(f"core count must be >= 1, got {n}")
    return predicted_power(profile, grid, meta, n, size) / predicted_power(profile, grid, meta, 1, size)


def speed_up(meta: ApplicationMeta, n: int) -> tuple[float, str]:
    """Speed-up on ``n`` cores and where it came from (``measured`` or ``amdahl``)."""
    if n == 1:
        return 1.0, "measured"
    if n in meta.speedup_samples:
        return float(meta.speedup_samples[n]), "measured"
    if meta.parallel_fraction is not None:
        return amdahl_speedup(meta.parallel_fraction, n), "amdahl"
    raise MetadataError(f"{meta.name}: no speed-up information for {n} cores")


def rth_decide(
    profile: PlatformProfile,
    grid: IntensityGrid,
    meta: ApplicationMeta,
    n_max: int | None = None,
    size: float | None = None,
) -> RthDecision:
    """Decide whether running on ``n_max`` cores beats one core on energy.

    Only the two extremes are compared. When ``meta`` carries neither a
    speed-up for ``n_max`` nor a parallel fraction, measured energies of the
    two configurations stand in: the speed-up they imply is
    ``power_up * E(1) / E(n_max)``. Equal speed-up and power-up means equal
    energy, and one core is kept.
    """
    if n_max is None:
        n_max = profile.max_cores
    if not isinstance(n_max, numbers.Integral) or n_max < 1:
        raise DomainError(f"n_max must be a positive integer, got {n_max!r}")
    p1 = predicted_power(profile, grid, meta, 1, size)
    pn = predicted_power(profile, grid, meta, n_max, size)
    pu = pn / p1
    try:
        su, source = speed_up(meta, n_max)
    except MetadataError:
        e = meta.energy_samples
        if 1 in e and n_max in e:
            su, source = pu * e[1] / e[n_max], "energy"
        else:
            raise MetadataError(
                f"{meta.name}: need a speed-up, a parallel fraction or measured energies "
                f"for 1 and {n_max} cores"
            ) from None
    # (su - pu) carries the exact sign of the comparison
    es = (su - pu) / su
    e1 = en = None
    if meta.baseline_time is not None:
        e1 = energy(p1, meta.baseline_time)
        en = energy(pn, meta.baseline_time / su)
    return RthDecision(
        use_rth=su > pu,
        n_max=int(n_max),
        power_up=pu,
        speed_up=su,
        energy_saving=es,
        speedup_source=source,
        predicted_e1=e1,
        predicted_en=en,
    )


def predict_energy_curve(
    profile: PlatformProfile,
    grid: IntensityGrid,
    meta: ApplicationMeta,
    core_counts: Iterable[int],
    *,
    baseline_time: float | None = None,
    times: Mapping[int, float] | None = None,
    size: float | None = None,
) -> list[CurvePoint]:
    """Predicted power, run time and energy for each core count.

    Run times are taken from ``times`` when given, otherwise derived from the
    single-core ``baseline_time`` (or ``meta.baseline_time``) and the
    application's speed-ups.
    """
    if times is None:
        t1 = baseline_time if baseline_time is not None else meta.baseline_time
        if t1 is None:
            raise MetadataError(f"{meta.name}: need a single-core baseline time or per-core times")
    curve = []
    for n in core_counts:
        if times is not None:
            if n not in times:
                raise MetadataError(f"{meta.name}: no run time for {n} cores")
            t = float(times[n])
        else:
            t = t1 / speed_up(meta, n)[0]
        p = predicted_power(profile, grid, meta, n, size)
        curve.append(CurvePoint(int(n), p, t, energy(p, t)))
    return curve


def best_core_count(curve: Sequence[CurvePoint]) -> int:
    """Core count with the least predicted energy (fewest cores on ties)."""
    return min(curve, key=lambda c: (c.energy, c.cores)).cores
