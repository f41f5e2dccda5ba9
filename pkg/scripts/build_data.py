"""Regenerate the derived files under src/rthpower/data from the bundled tables."""

from rthpower import io
from rthpower.fitting import MeasurementRecord, benchmark_mix
from rthpower.model import units_power
from rthpower.reference import (
    CORE_COUNTS,
    build_platform_file,
    data_path,
    reference_apps,
    reference_profile,
    unit_suite_benchmarks,
)


def main():
    pf = build_platform_file()
    io.write_platform(data_path("myriad1.toml"), pf)
    for name, meta in reference_apps(pf).items():
        io.write_app_meta(data_path("apps", f"{name}.toml"), meta)
    profile = reference_profile()
    records = [
        MeasurementRecord(b, None, n, units_power(profile, benchmark_mix(b), n))
        for b in unit_suite_benchmarks()
        for n in CORE_COUNTS
    ]
    header = "# Unit-suite powers generated by the operation-unit model from the published constants.\n"
    data_path("myriad1", "unit_suite_model.csv").write_text(
        header + io.format_measurements(records), encoding="utf-8"
    )


if __name__ == "__main__":
    main()
