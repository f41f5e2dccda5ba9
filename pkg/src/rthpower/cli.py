"""Command-line interface: ``rthpower {fit-units,fit-intensity,predict,decide,validate}``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import replace

from . import io
from .errors import ConfigurationError, FitError, RthPowerError
from .fitting import (
    BetaFactor,
    benchmark_mix,
    default_bounds,
    fit_intensity_params,
    fit_static_active,
    improved_power,
)
from .framework import rth_decide
from .model import OpMix, percentage_error, units_power
from .tsk import IntensityGrid, tsk_power

log = logging.getLogger("rthpower")


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=False))
    else:
        print("\n".join(lines))


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _mix_arg(text: str) -> OpMix:
    return OpMix(t.strip() for t in text.split(",") if t.strip())


def _records_at(records, intensity: float):
    return [r for r in records if r.intensity is not None and math.isclose(r.intensity, intensity, rel_tol=1e-9)]


def _mix_for(records, override: OpMix | None) -> OpMix:
    if override is not None:
        return override
    names = sorted({r.benchmark for r in records})
    mixes = {benchmark_mix(b).ops for b in names}
    if len(mixes) != 1:
        raise ConfigurationError(
            f"records at one intensity decode to different operation mixes ({', '.join(names)}); pass --mix"
        )
    return OpMix(mixes.pop())


# --------------------------------------------------------------------------


def cmd_fit_units(args) -> int:
    records = [r for r in io.read_measurements(args.measurements) if r.intensity is None]
    if not records:
        raise FitError("no operation-unit rows (rows with empty intensity) in the measurement file")
    train = records
    if args.train_cores:
        train = [r for r in records if r.cores in args.train_cores]
    held_out = [r for r in records if r not in train]
    fit = fit_static_active(train)
    profile = fit.to_profile(p_lsu=args.p_lsu, max_cores=args.max_cores)
    io.write_platform(args.output, io.PlatformFile(profile=profile, name=args.name or ""))

    def pe(recs):
        return [percentage_error(r.power, units_power(profile, benchmark_mix(r.benchmark), r.cores)) for r in recs]

    train_pe, test_pe = pe(train), pe(held_out)
    payload = {
        "p_sta": fit.p_static,
        "p_act": fit.p_active,
        "ops": fit.dynamic,
        "clamped": list(fit.clamped),
        "residual_rms_mw": fit.residual_rms,
        "train_max_abs_pe": max(map(abs, train_pe)),
        "validation_max_abs_pe": max(map(abs, test_pe)) if test_pe else None,
        "output": str(args.output),
    }
    lines = [
        f"p_sta = {fit.p_static:.6g} mW",
        f"p_act = {fit.p_active:.6g} mW",
        *(f"  {op:<10} {p:.6g} mW" for op, p in fit.dynamic.items()),
        f"residual rms = {fit.residual_rms:.4g} mW over {len(train)} rows",
        f"max |PE| train = {payload['train_max_abs_pe']:.4%}",
    ]
    if fit.clamped:
        lines.append(f"clamped to zero: {', '.join(fit.clamped)}")
    if test_pe:
        lines.append(f"max |PE| held-out ({len(held_out)} rows) = {payload['validation_max_abs_pe']:.4%}")
    lines.append(f"wrote {args.output}")
    _emit(args, payload, lines)
    return 0


def cmd_fit_intensity(args) -> int:
    pf = io.read_platform(args.platform)
    records = io.read_measurements(args.measurements)
    intensities = args.intensity or sorted({r.intensity for r in records if r.intensity is not None})
    if not intensities:
        raise FitError("no intensity rows in the measurement file")
    existing = {p.intensity: p for p in pf.grid.points} if pf.grid else {}
    residuals = dict(pf.residuals)
    bounds = default_bounds(pf.profile, sorted(set(existing) | set(intensities)))
    fitted = []
    for intensity in intensities:
        recs = _records_at(records, intensity)
        if not recs:
            raise FitError(f"no records at intensity {intensity}")
        result = fit_intensity_params(pf.profile, _mix_for(recs, args.mix), intensity, recs, bounds=bounds)
        existing[result.params.intensity] = result.params
        residuals[result.params.intensity] = result.residual_rms
        fitted.append(result)
    grid = IntensityGrid(existing[i] for i in sorted(existing))
    out = args.output or args.platform
    io.write_platform(out, replace(pf, grid=grid, residuals=residuals))
    payload = {
        "points": [
            {
                "intensity": r.params.intensity,
                "alpha": r.params.alpha,
                "m": r.params.m,
                "p_ctn": r.params.p_ctn,
                "residual_rms_mw": r.residual_rms,
                "max_abs_pe": max(map(abs, r.per_point_pe)),
            }
            for r in fitted
        ],
        "output": str(out),
    }
    lines = [f"{'I':>8} {'alpha':>10} {'m':>8} {'p_ctn':>8} {'rms mW':>8} {'max|PE|':>8}"]
    for p in payload["points"]:
        lines.append(
            f"{p['intensity']:>8g} {p['alpha']:>10.4g} {p['m']:>8.4g} {p['p_ctn']:>8.4g} "
            f"{p['residual_rms_mw']:>8.3g} {p['max_abs_pe']:>8.2%}"
        )
    lines.append(f"wrote {out}")
    _emit(args, payload, lines)
    return 0


def _require_grid(pf) -> IntensityGrid:
    if pf.grid is None:
        raise ConfigurationError("platform file has no intensity grid; run fit-intensity first")
    return pf.grid


def cmd_predict(args) -> int:
    pf = io.read_platform(args.platform)
    grid = _require_grid(pf)
    raw = tsk_power(pf.profile, grid, args.mix or OpMix(), args.intensity, args.cores)
    beta = args.beta if args.beta is not None else pf.betas.get(args.cores)
    power = raw if beta is None else improved_power(raw, beta)
    beta_value = beta.beta if isinstance(beta, BetaFactor) else beta
    payload = {
        "intensity": args.intensity,
        "cores": args.cores,
        "raw_power_mw": raw,
        "beta": beta_value,
        "power_mw": power,
    }
    lines = [f"{power:.6f} mW"]
    if beta is not None:
        lines[0] += f" (model {raw:.6f} mW x beta {beta_value:.6g})"
    _emit(args, payload, lines)
    return 0


def cmd_decide(args) -> int:
    pf = io.read_platform(args.platform)
    grid = _require_grid(pf)
    meta = io.read_app_meta(args.meta)
    if not meta.betas and pf.betas:
        meta = replace(meta, betas=dict(pf.betas))
    d = rth_decide(pf.profile, grid, meta, args.n_max, size=args.size)
    payload = {
        "application": meta.name,
        "decision": d.verdict,
        "use_rth": d.use_rth,
        "n_max": d.n_max,
        "power_up": d.power_up,
        "speed_up": d.speed_up,
        "speedup_source": d.speedup_source,
        "energy_saving": d.energy_saving,
        "predicted_e1_mj": d.predicted_e1,
        "predicted_en_mj": d.predicted_en,
    }
    lines = [
        f"application:    {meta.name}",
        f"decision:       {d.verdict}",
        f"cores compared: 1 vs {d.n_max}",
        f"power-up:       {d.power_up:.4f}",
        f"speed-up:       {d.speed_up:.4f} ({d.speedup_source})",
        f"energy saving:  {d.energy_saving:+.2%}",
    ]
    if d.predicted_e1 is not None:
        lines.append(f"energy 1 core:  {d.predicted_e1:.4f} mJ")
        lines.append(f"energy {d.n_max} cores: {d.predicted_en:.4f} mJ")
    _emit(args, payload, lines)
    return 0


def cmd_validate(args) -> int:
    pf = io.read_platform(args.platform)
    records = io.read_measurements(args.measurements)
    threshold = args.threshold / 100.0
    rows = []
    for r in records:
        if r.intensity is None:
            est = units_power(pf.profile, benchmark_mix(r.benchmark), r.cores)
            group = r.benchmark
        else:
            mix = args.mix if args.mix is not None else benchmark_mix(r.benchmark)
            est = tsk_power(pf.profile, _require_grid(pf), mix, r.intensity, r.cores)
            group = f"I={r.intensity:g}"
        pe = percentage_error(r.power, est)
        rows.append({"benchmark": r.benchmark, "group": group, "intensity": r.intensity,
                     "cores": r.cores, "measured_mw": r.power, "estimated_mw": est,
                     "pe": pe, "abs_pe": abs(pe)})
    groups: dict[str, float] = {}
    for row in rows:
        groups[row["group"]] = max(groups.get(row["group"], 0.0), row["abs_pe"])
    max_abs = max(groups.values())
    passed = max_abs <= threshold
    payload = {"samples": rows, "group_max_abs_pe": groups, "max_abs_pe": max_abs,
               "threshold": threshold, "pass": passed}
    lines = [f"{'benchmark':<24} {'I':>6} {'n':>3} {'measured':>10} {'estimated':>10} {'PE':>8} {'|PE|':>7}"]
    for row in rows:
        i = "-" if row["intensity"] is None else f"{row['intensity']:g}"
        lines.append(
            f"{row['benchmark']:<24} {i:>6} {row['cores']:>3} {row['measured_mw']:>10.3f} "
            f"{row['estimated_mw']:>10.3f} {row['pe']:>+8.2%} {row['abs_pe']:>7.2%}"
        )
    lines.append("")
    lines.extend(f"max |PE| {g:<24} {v:.3%}" for g, v in groups.items())
    lines.append(f"{'PASS' if passed else 'FAIL'}: max |PE| {max_abs:.3%} vs threshold {threshold:.3%}")
    _emit(args, payload, lines)
    return 0 if passed else 1


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rthpower", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit-units", parents=[common], help="fit static, active and operation powers")
    p.add_argument("measurements")
    p.add_argument("-o", "--output", required=True, help="platform file to write")
    p.add_argument("--train-cores", type=_int_list, help="fit on these core counts only, validate on the rest")
    p.add_argument("--max-cores", type=int, default=8)
    p.add_argument("--p-lsu", type=float, default=None, help="load/store unit power (default: fitted LSULOAD, else 28)")
    p.add_argument("--name", default=None)
    p.set_defaults(func=cmd_fit_units)

    p = sub.add_parser("fit-intensity", parents=[common], help="fit alpha, m, p_ctn per intensity")
    p.add_argument("platform")
    p.add_argument("measurements")
    p.add_argument("--intensity", type=_float_list, help="comma-separated intensities (default: all in file)")
    p.add_argument("--mix", type=_mix_arg, default=None, help="comma-separated operations of the benchmark")
    p.add_argument("-o", "--output", default=None, help="write here instead of updating the platform file")
    p.set_defaults(func=cmd_fit_intensity)

    p = sub.add_parser("predict", parents=[common], help="predict power at an intensity and core count")
    p.add_argument("platform")
    p.add_argument("--intensity", type=float, required=True)
    p.add_argument("--cores", type=int, required=True)
    p.add_argument("--mix", type=_mix_arg, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("decide", parents=[common], help="decide whether race-to-halt saves energy")
    p.add_argument("platform")
    p.add_argument("meta", help="application metadata file")
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--size", type=float, default=None, help="problem size for size-dependent intensity")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("validate", parents=[common], help="percentage errors of the model against measurements")
    p.add_argument("platform")
    p.add_argument("measurements")
    p.add_argument("--threshold", type=float, required=True, help="pass threshold on max |PE|, in percent")
    p.add_argument("--mix", type=_mix_arg, default=None)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except RthPowerError as exc:
        print(f"rthpower: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
