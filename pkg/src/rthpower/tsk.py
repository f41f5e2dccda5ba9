"""Takagi-Sugeno-Kang blending of per-intensity power models.

Each grid point carries its own ``(alpha, m, p_ctn)``; evaluated at the
query intensity it gives a complete power model in the core count.  The
blend weights come from triangular membership functions placed on the grid
in log2-intensity, each triangle peaking at its own grid point and reaching
zero at its neighbours.  Outside the grid the nearest end point takes the
whole weight.  The core count is never blended: it enters each model
exactly.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Iterable

from .errors import ConfigurationError, DomainError
from .model import IntensityParams, PlatformProfile, app_power

# intensity-suite grid of the Myriad1 characterisation
MYRIAD1_GRID_INTENSITIES = (0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)


@dataclass(frozen=True)
class IntensityGrid:
    points: tuple[IntensityParams, ...]

    def __init__(self, points: Iterable[IntensityParams]):
        points = tuple(points)
        if not points:
            raise ConfigurationError("intensity grid is empty")
        for a, b in zip(points, points[1:]):
            if not a.intensity < b.intensity:
                raise ConfigurationError(
                    f"grid intensities must be strictly ascending: {a.intensity} then {b.intensity}"
                )
        object.__setattr__(self, "points", points)

    @property
    def intensities(self) -> tuple[float, ...]:
        return tuple(p.intensity for p in self.points)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]


def memberships(grid: IntensityGrid, intensity: float) -> list[float]:
    """Normalised triangular membership of ``intensity`` in every grid point."""
    if not intensity > 0:
        raise DomainError(f"operational intensity must be > 0, got {intensity}")
    xs = [math.log2(i) for i in grid.intensities]
    x = math.log2(intensity)
    w = [0.0] * len(xs)
    if x <= xs[0]:
        w[0] = 1.0
        return w
    if x >= xs[-1]:
        w[-1] = 1.0
        return w
    k = bisect.bisect_right(xs, x) - 1
    if x == xs[k]:
        w[k] = 1.0
        return w
    right = (x - xs[k]) / (xs[k + 1] - xs[k])
    w[k] = 1.0 - right
    w[k + 1] = right
    return w


def tsk_power(
    profile: PlatformProfile,
    grid: IntensityGrid,
    mix,
    intensity: float,
    n: int,
) -> float:
    """Blended power of an application of intensity ``intensity`` on ``n`` cores."""
    if not isinstance(grid, IntensityGrid) or not grid.points:
        raise ConfigurationError("intensity grid is empty")
    weights = memberships(grid, intensity)
    total = 0.0
    for w, params in zip(weights, grid.points):
        if w > 0.0:
            total += w * app_power(profile, params, mix, intensity, n)
    return total / math.fsum(weights)
