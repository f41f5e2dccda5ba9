import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import finite
from rthpower.errors import ConfigurationError, DomainError
from rthpower.model import IntensityParams, app_power
from rthpower.tsk import MYRIAD1_GRID_INTENSITIES, IntensityGrid, memberships, tsk_power

MIX = ["SAUXOR"]


def make_grid(intensities=MYRIAD1_GRID_INTENSITIES, seed=0):
    rng = np.random.default_rng(seed)
    return IntensityGrid(
        IntensityParams(i, i * rng.uniform(0.3, 3), rng.uniform(1, 8), rng.uniform(0, 60))
        for i in intensities
    )


def test_grid_validation():
    with pytest.raises(ConfigurationError):
        IntensityGrid([])
    p = IntensityParams(1.0, 1.0, 1.0, 1.0)
    q = IntensityParams(0.5, 1.0, 1.0, 1.0)
    with pytest.raises(ConfigurationError):
        IntensityGrid([p, q])
    with pytest.raises(ConfigurationError):
        IntensityGrid([p, p])


def test_memberships_hand_values():
    grid = make_grid()
    w = memberships(grid, 2 ** 0.5)  # halfway between 1 and 2 in log space
    assert w[2] == pytest.approx(0.5) and w[3] == pytest.approx(0.5)
    assert sum(w) == 1.0
    w = memberships(grid, 3.0)
    assert w[3] == pytest.approx(2 - math.log2(3))
    assert w[4] == pytest.approx(math.log2(3) - 1)


@settings(max_examples=300, deadline=None)
@given(st.floats(1e-3, 1e3, **finite))
def test_memberships_partition_of_unity(i):
    w = memberships(make_grid(), i)
    assert math.isclose(sum(w), 1.0, rel_tol=1e-12)
    assert all(x >= 0 for x in w)
    assert sum(1 for x in w if x > 0) <= 2


@pytest.mark.parametrize("k", range(len(MYRIAD1_GRID_INTENSITIES)))
def test_exact_at_grid_points(profile, k):
    grid = make_grid()
    p = grid[k]
    for n in (0, 1, 3, 8):
        assert tsk_power(profile, grid, MIX, p.intensity, n) == app_power(profile, p, MIX, p.intensity, n)


def test_clamped_outside_grid(profile):
    grid = make_grid()
    for i, p in ((0.01, grid[0]), (1000.0, grid[-1])):
        assert tsk_power(profile, grid, MIX, i, 4) == app_power(profile, p, MIX, i, 4)


def test_single_point_grid(profile):
    p = IntensityParams(0.25, 0.2, 2.0, 10.0)
    grid = IntensityGrid([p])
    for i in (0.1, 0.25, 5.0):
        assert tsk_power(profile, grid, MIX, i, 8) == app_power(profile, p, MIX, i, 8)


def test_blend_is_weighted_average(profile):
    grid = make_grid()
    i = 3.0
    w = memberships(grid, i)
    expected = w[3] * app_power(profile, grid[3], MIX, i, 5) + w[4] * app_power(profile, grid[4], MIX, i, 5)
    assert tsk_power(profile, grid, MIX, i, 5) == pytest.approx(expected, rel=1e-14)


def test_domain(profile):
    with pytest.raises(DomainError):
        tsk_power(profile, make_grid(), MIX, 0.0, 1)


def test_dense_sweep_continuity(profile):
    # adjacent samples never jump by more than the single-point models move
    for seed in range(2):
        grid = make_grid(seed=seed)
        xs = np.geomspace(0.1, 128, 2001)
        for n in (1, 4, 8):
            vals = np.array([tsk_power(profile, grid, MIX, x, n) for x in xs])
            local = np.array(
                [max(abs(app_power(profile, p, MIX, b, n) - app_power(profile, p, MIX, a, n)) for p in grid.points)
                 for a, b in zip(xs, xs[1:])]
            )
            spread = np.array(
                [max(app_power(profile, p, MIX, x, n) for p in grid.points)
                 - min(app_power(profile, p, MIX, x, n) for p in grid.points) for x in xs[1:]]
            )
            step = np.abs(np.diff(vals))
            # weight change contributes at most d(w) * spread between models
            dw = np.abs(np.diff(np.log2(xs))) / 1.0
            assert np.all(step <= local + dw * spread + 1e-6 * vals[1:])
