import pytest

from rthpower import io
from rthpower.fitting import benchmark_mix, compute_beta
from rthpower.model import units_power
from rthpower.reference import (
    CORE_COUNTS,
    build_platform_file,
    bundled_app,
    data_path,
    load_platform,
    reference_apps,
    table,
    unit_suite_benchmarks,
)


def test_bundled_platform_is_reproducible():
    bundled, rebuilt = load_platform(), build_platform_file()
    assert bundled.profile == rebuilt.profile
    assert bundled.grid.intensities == rebuilt.grid.intensities
    for a, b in zip(bundled.grid.points, rebuilt.grid.points):
        assert a.alpha == pytest.approx(b.alpha, rel=1e-6)
        assert a.m == pytest.approx(b.m, rel=1e-6)
        assert a.p_ctn == pytest.approx(b.p_ctn, rel=1e-6)
    for n in (1, 8):
        assert bundled.betas[n].beta == pytest.approx(rebuilt.betas[n].beta, rel=1e-6)


def test_bundled_apps_match_tables():
    pf = load_platform()
    for name, meta in reference_apps(pf).items():
        assert bundled_app(name) == io.parse_app_meta(io.format_app_meta(meta))


def test_model_unit_suite_file(profile):
    recs = io.read_measurements(data_path("myriad1", "unit_suite_model.csv"))
    assert len(recs) == 26 * len(CORE_COUNTS)
    assert {r.benchmark for r in recs} == set(unit_suite_benchmarks())
    for r in recs:
        assert r.power == pytest.approx(units_power(profile, benchmark_mix(r.benchmark), r.cores), rel=1e-12)


def test_published_power_up_column():
    rows = table("micro_speedup_powerup.csv")
    for row, k in zip(rows, (119, 142, 175, 204)):
        assert float(row["power_up"]) == pytest.approx(k / 119, abs=1e-9)


def test_published_betas_reproduce_after_errors():
    betas = {(r["kernel"], int(r["cores"])): compute_beta([float(r["mean_pe"])]).beta for r in table("kernel_betas.csv")}
    for row in table("kernel_percentage_errors.csv"):
        before = float(row["before_pct"]) / 100
        after = float(row["after_pct"]) / 100
        beta = betas[(row["kernel"], int(row["cores"]))]
        # estimate/measurement = 1 + before; corrected = beta * that
        assert beta * (1 + before) - 1 == pytest.approx(after, abs=0.016)


def test_published_micro_energies_agree_with_speedups():
    speed = {int(r["cores"]): r for r in table("micro_speedup_powerup.csv")}
    for row in table("micro_energy.csv"):
        n = int(row["cores"])
        e1 = 169.218
        expected = e1 * float(speed[n]["power_up"]) / float(speed[n]["speedup_100_parallel"])
        assert float(row["p100_measured"]) == pytest.approx(expected, rel=2e-3)
