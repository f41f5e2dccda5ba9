"""Analytical power equations for operation units and whole applications.

All power values are in milliwatts.  A platform is described by a static
power drawn whenever the chip is on, a per-core active power, the dynamic
power of the load/store unit and a table of per-operation dynamic powers.
Applications are placed on the memory-bound / compute-bound axis by their
operational intensity (operations per transferred byte) relative to the
time ratio ``alpha`` of moving one byte to performing one operation.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CoreRangeError, DomainError, UnknownOperationError

DEFAULT_P_LSU = 28.0


@dataclass(frozen=True)
class OperationKind:
    name: str
    dynamic_power: float

    def __post_init__(self):
        if not self.name:
            raise ValueError("operation name must be non-empty")
        if not self.dynamic_power >= 0:
            raise ValueError(f"{self.name}: dynamic power must be >= 0, got {self.dynamic_power}")


@dataclass(frozen=True)
class PlatformProfile:
    """Static, active and per-operation dynamic powers of one platform.

    Parameters
    ----------
    p_static : float
        Chip-wide static power (mW).
    p_active : float
        Active power added per running core (mW).
    p_lsu : float
        Dynamic power of the load/store unit used while moving data (mW).
    op_table : tuple of OperationKind
        Dynamic power of each operation unit.
    max_cores : int
        Number of cores on the chip.
    """

    p_static: float
    p_active: float
    p_lsu: float = DEFAULT_P_LSU
    op_table: tuple[OperationKind, ...] = ()
    max_cores: int = 8
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        for label in ("p_static", "p_active", "p_lsu"):
            if not getattr(self, label) >= 0:
                raise ValueError(f"{label} must be >= 0, got {getattr(self, label)}")
        if not isinstance(self.max_cores, numbers.Integral) or self.max_cores < 1:
            raise ValueError(f"max_cores must be a positive integer, got {self.max_cores!r}")
        ops = tuple(self.op_table)
        index = {}
        for op in ops:
            if op.name in index:
                raise ValueError(f"duplicate operation {op.name!r}")
            index[op.name] = op.dynamic_power
        object.__setattr__(self, "op_table", ops)
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_table(
        cls,
        p_static: float,
        p_active: float,
        ops: Mapping[str, float],
        *,
        p_lsu: float = DEFAULT_P_LSU,
        max_cores: int = 8,
    ) -> "PlatformProfile":
        table = tuple(OperationKind(name, float(p)) for name, p in ops.items())
        return cls(float(p_static), float(p_active), float(p_lsu), table, int(max_cores))

    @property
    def ops(self) -> dict[str, float]:
        """Operation name to dynamic power, in table order."""
        return dict(self._index)

    def dynamic_power(self, name: str) -> float:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownOperationError(name) from None

    def mix_power(self, mix: "OpMix | Iterable[str]") -> float:
        """Sum of dynamic powers of the operations in ``mix``."""
        names = mix.ops if isinstance(mix, OpMix) else tuple(mix)
        return math.fsum(self.dynamic_power(name) for name in names)


@dataclass(frozen=True)
class IntensityParams:
    """Fitted parameters attached to one operational-intensity grid point.

    ``alpha`` is the time ratio of transferring one byte to performing one
    operation, ``m`` the average number of cores accessing data in parallel
    and ``p_ctn`` the contention power of a core stalled on memory (mW).
    """

    intensity: float
    alpha: float
    m: float
    p_ctn: float

    def __post_init__(self):
        if not self.intensity > 0:
            raise ValueError(f"intensity must be > 0, got {self.intensity}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if not self.m >= 0:
            raise ValueError(f"m must be >= 0, got {self.m}")
        if not self.p_ctn >= 0:
            raise ValueError(f"p_ctn must be >= 0, got {self.p_ctn}")


@dataclass(frozen=True)
class WorkloadCounts:
    work: float
    bytes: float

    def __post_init__(self):
        if self.work < 0:
            raise ValueError(f"work must be >= 0, got {self.work}")
        if self.bytes < 0:
            raise ValueError(f"bytes must be >= 0, got {self.bytes}")


@dataclass(frozen=True)
class OpMix:
    """Operation units exercised by every active core.

    Names may repeat; a benchmark driving both load units counts the load
    power twice.
    """

    ops: tuple[str, ...] = ()

    def __init__(self, ops: Iterable[str] = ()):
        if isinstance(ops, str):
            ops = (ops,)
        object.__setattr__(self, "ops", tuple(ops))

    def __iter__(self):
        return iter(self.ops)

    def __len__(self):
        return len(self.ops)

    def __add__(self, other: "OpMix") -> "OpMix":
        return OpMix(self.ops + tuple(other))

    def validate(self, profile: PlatformProfile) -> None:
        for name in self.ops:
            profile.dynamic_power(name)


def _as_mix(mix) -> OpMix:
    return mix if isinstance(mix, OpMix) else OpMix(mix)


def check_cores(profile: PlatformProfile, n) -> int:
    if isinstance(n, bool) or not isinstance(n, numbers.Integral):
        raise CoreRangeError(f"core count must be an integer, got {n!r}")
    if n < 0 or n > profile.max_cores:
        raise CoreRangeError(f"core count {n} outside [0, {profile.max_cores}]")
    return int(n)


def units_power(profile: PlatformProfile, mix, n: int) -> float:
    """Power of ``n`` cores each exercising the operation units in ``mix``.

    ``P = P_sta + n * (P_act + sum of dynamic powers)``.
    """
    n = check_cores(profile, n)
    dyn = profile.mix_power(_as_mix(mix))
    return profile.p_static + n * (profile.p_active + dyn)


def comp_power(profile: PlatformProfile, mix, n: int) -> float:
    """Chip power while cores only compute (no memory traffic)."""
    n = check_cores(profile, n)
    dyn = profile.mix_power(_as_mix(mix))
    return profile.p_static + n * (profile.p_active + dyn)


def data_power(profile: PlatformProfile, params: IntensityParams, n: int) -> float:
    """Chip power while cores only move data.

    ``min(m, n)`` cores are served by memory and draw active plus LSU power;
    the remaining ``n - m`` stall and draw the contention power.
    """
    n = check_cores(profile, n)
    served = min(params.m, n)
    waiting = max(n - params.m, 0.0)
    return profile.p_static + served * (profile.p_active + profile.p_lsu) + waiting * params.p_ctn


def comp_data_power(profile: PlatformProfile, params: IntensityParams, mix, n: int) -> float:
    """Chip power while computation and data transfer overlap."""
    n = check_cores(profile, n)
    dyn = profile.mix_power(_as_mix(mix))
    served = min(params.m, n)
    waiting = max(n - params.m, 0.0)
    return (
        profile.p_static
        + served * (profile.p_active + profile.p_lsu + dyn)
        + waiting * params.p_ctn
    )


def _blend(p_overlap: float, p_data: float, p_comp: float, alpha: float, intensity: float) -> float:
    if intensity < alpha:
        # memory bound: overlap for I/alpha of the run, data-only for the rest
        return p_overlap * (intensity / alpha) + p_data * ((alpha - intensity) / alpha)
    if intensity > alpha:
        # compute bound: overlap for alpha/I of the run, compute-only for the rest
        return p_overlap * (alpha / intensity) + p_comp * ((intensity - alpha) / intensity)
    return p_overlap


def app_power(
    profile: PlatformProfile,
    params: IntensityParams,
    mix,
    intensity: float,
    n: int,
) -> float:
    """Power of an application of operational intensity ``intensity`` on ``n`` cores.

    ``params`` need not sit at ``intensity``; interpolation evaluates
    neighbouring grid points at the query intensity.
    """
    if not intensity > 0:
        raise DomainError(f"operational intensity must be > 0, got {intensity}")
    mix = _as_mix(mix)
    p_overlap = comp_data_power(profile, params, mix, n)
    p_data = data_power(profile, params, n)
    p_comp = comp_power(profile, mix, n)
    return _blend(p_overlap, p_data, p_comp, params.alpha, float(intensity))


def operational_intensity(counts: WorkloadCounts) -> float:
    """Operations per transferred byte, ``W / Q``."""
    if counts.bytes == 0:
        raise DomainError("operational intensity undefined for zero transferred bytes")
    return counts.work / counts.bytes


def percentage_error(measured: float, estimated: float) -> float:
    """Signed error ``(measured - estimated) / measured``; take ``abs`` for the absolute form."""
    if measured == 0:
        raise DomainError("percentage error undefined for a zero measurement")
    return (measured - estimated) / measured


def app_power_array(
    p_static: float,
    p_active: float,
    p_lsu: float,
    dyn: float,
    alpha: float,
    m: float,
    p_ctn: float,
    intensity: float,
    cores: Sequence[float] | np.ndarray,
) -> np.ndarray:
    """Vectorised ``app_power`` over core counts, without validation.

    Used in the inner loop of parameter fitting.
    """
    n = np.asarray(cores, dtype=float)
    served = np.minimum(m, n)
    waiting = np.maximum(n - m, 0.0)
    p_data = p_static + served * (p_active + p_lsu) + waiting * p_ctn
    p_overlap = p_data + served * dyn
    p_comp = p_static + n * (p_active + dyn)
    if intensity < alpha:
        return p_overlap * (intensity / alpha) + p_data * ((alpha - intensity) / alpha)
    if intensity > alpha:
        return p_overlap * (alpha / intensity) + p_comp * ((intensity - alpha) / intensity)
    return p_overlap
