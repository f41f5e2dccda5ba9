"""Reading and writing measurement CSVs, platform files and application metadata.

Measurement CSV
    UTF-8, comma separated, mandatory header
    ``benchmark,intensity,cores,power_mw,time_s``.  ``intensity`` is empty
    for operation-unit benchmarks and ``time_s`` may be empty or absent.
    Lines starting with ``#`` are comments.

Platform file (TOML)
    ``[platform]`` holds ``p_sta``, ``p_act``, ``p_lsu``, ``max_cores`` and an
    ``[platform.ops]`` table of dynamic powers; optional ``[[grid]]`` entries
    hold ``intensity``, ``alpha``, ``m``, ``p_ctn`` (and ``residual_rms``);
    optional ``[beta.<cores>]`` tables hold ``beta`` and ``mean_pe``.

Application metadata (TOML)
    ``name``, ``intensity`` (a number, or a table with ``coefficient`` and
    ``exponent``), ``mix``, and optional ``parallel_fraction``,
    ``baseline_time_s``, ``[speedup]``, ``[energy_mj]`` and ``[beta.<cores>]``.
"""

from __future__ import annotations

import csv
import io
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ParseError
from .fitting import BetaFactor, MeasurementRecord
from .framework import ApplicationMeta, IntensityLaw
from .model import IntensityParams, OpMix, PlatformProfile
from .tsk import IntensityGrid

CSV_HEADER = ("benchmark", "intensity", "cores", "power_mw", "time_s")


# --------------------------------------------------------------------------
# measurements


def _uncommented(lines: Iterable[str]):
    for lineno, line in enumerate(lines, start=1):
        if line.lstrip().startswith("#") or not line.strip():
            continue
        yield lineno, line


def parse_measurements(text: str, *, path: str | None = None) -> list[MeasurementRecord]:
    rows = list(_uncommented(text.splitlines()))
    if not rows:
        raise ParseError("empty measurement file", path=path)
    header_line, header = rows[0]
    columns = [c.strip() for c in next(csv.reader([header]))]
    if tuple(columns[:4]) != CSV_HEADER[:4] or columns[4:] not in ([], ["time_s"]):
        raise ParseError(
            f"expected header {','.join(CSV_HEADER)}, got {','.join(columns)}",
            path=path,
            line=header_line,
        )
    records = []
    for lineno, line in rows[1:]:
        cells = [c.strip() for c in next(csv.reader([line]))]
        if len(cells) == 4 and len(columns) == 5:
            cells.append("")
        if len(cells) != len(columns):
            raise ParseError(
                f"expected {len(columns)} fields, got {len(cells)}", path=path, line=lineno
            )
        bench, intensity, cores, power = cells[:4]
        time = cells[4] if len(cells) > 4 else ""
        try:
            records.append(
                MeasurementRecord(
                    benchmark=bench,
                    intensity=float(intensity) if intensity else None,
                    cores=_parse_int(cores),
                    power=float(power),
                    time=float(time) if time else None,
                )
            )
        except ValueError as exc:
            raise ParseError(f"bad row {line.strip()!r}: {exc}", path=path, line=lineno) from None
    if not records:
        raise ParseError("no measurement rows", path=path)
    return records


def _parse_int(text: str) -> int:
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"core count must be an integer, got {text}")
    return int(value)


def read_measurements(path) -> list[MeasurementRecord]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(str(exc), path=str(path)) from None
    return parse_measurements(text, path=str(path))


def format_measurements(records: Iterable[MeasurementRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(
            [
                r.benchmark,
                "" if r.intensity is None else repr(float(r.intensity)),
                int(r.cores),
                repr(float(r.power)),
                "" if r.time is None else repr(float(r.time)),
            ]
        )
    return buf.getvalue()


def write_measurements(path, records: Iterable[MeasurementRecord]) -> None:
    Path(path).write_text(format_measurements(records), encoding="utf-8")


# --------------------------------------------------------------------------
# platform file


@dataclass(frozen=True)
class PlatformFile:
    profile: PlatformProfile
    grid: IntensityGrid | None = None
    betas: Mapping[int, BetaFactor] = field(default_factory=dict)
    residuals: Mapping[float, float] = field(default_factory=dict)
    name: str = ""


def _require(table: dict, key: str, where: str, path):
    if key not in table:
        raise ParseError(f"missing {where}.{key}", path=path)
    return table[key]


def _betas_from_toml(table: Mapping, path) -> dict[int, BetaFactor]:
    betas = {}
    for key, entry in table.items():
        try:
            cores = int(key)
            beta = float(entry["beta"])
            mean_pe = float(entry.get("mean_pe", 1.0 / beta - 1.0))
            betas[cores] = BetaFactor(cores, beta, mean_pe)
        except (TypeError, ValueError, KeyError) as exc:
            raise ParseError(f"bad beta entry {key!r}: {exc}", path=path) from None
    return dict(sorted(betas.items()))


def _betas_to_toml(betas: Mapping[int, BetaFactor]) -> dict:
    return {str(n): {"beta": b.beta, "mean_pe": b.mean_pe} for n, b in sorted(betas.items())}


def parse_platform(text: str, *, path: str | None = None) -> PlatformFile:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(str(exc), path=path) from None
    plat = _require(doc, "platform", "", path)
    try:
        profile = PlatformProfile.from_table(
            float(_require(plat, "p_sta", "platform", path)),
            float(_require(plat, "p_act", "platform", path)),
            {str(k): float(v) for k, v in plat.get("ops", {}).items()},
            p_lsu=float(plat.get("p_lsu", 28.0)),
            max_cores=int(plat.get("max_cores", 8)),
        )
        grid = None
        residuals = {}
        if doc.get("grid"):
            points = []
            for entry in doc["grid"]:
                point = IntensityParams(
                    float(entry["intensity"]),
                    float(entry["alpha"]),
                    float(entry["m"]),
                    float(entry["p_ctn"]),
                )
                points.append(point)
                if "residual_rms" in entry:
                    residuals[point.intensity] = float(entry["residual_rms"])
            grid = IntensityGrid(sorted(points, key=lambda p: p.intensity))
    except (TypeError, ValueError, KeyError) as exc:
        raise ParseError(f"invalid platform file: {exc}", path=path) from None
    return PlatformFile(
        profile=profile,
        grid=grid,
        betas=_betas_from_toml(doc.get("beta", {}), path),
        residuals=residuals,
        name=str(doc.get("name", "")),
    )


def format_platform(pf: PlatformFile) -> str:
    p = pf.profile
    doc: dict = {}
    if pf.name:
        doc["name"] = pf.name
    doc["platform"] = {
        "p_sta": p.p_static,
        "p_act": p.p_active,
        "p_lsu": p.p_lsu,
        "max_cores": p.max_cores,
        "ops": {op.name: op.dynamic_power for op in p.op_table},
    }
    if pf.grid is not None:
        doc["grid"] = []
        for point in pf.grid.points:
            entry = {
                "intensity": point.intensity,
                "alpha": point.alpha,
                "m": point.m,
                "p_ctn": point.p_ctn,
            }
            if point.intensity in pf.residuals:
                entry["residual_rms"] = pf.residuals[point.intensity]
            doc["grid"].append(entry)
    if pf.betas:
        doc["beta"] = _betas_to_toml(pf.betas)
    return tomli_w.dumps(doc)


def read_platform(path) -> PlatformFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(str(exc), path=str(path)) from None
    return parse_platform(text, path=str(path))


def write_platform(path, pf: PlatformFile) -> None:
    Path(path).write_text(format_platform(pf), encoding="utf-8")


# --------------------------------------------------------------------------
# application metadata


def _int_keyed(table: Mapping, what: str, path) -> dict[int, float]:
    out = {}
    for key, value in table.items():
        try:
            out[int(key)] = float(value)
        except (TypeError, ValueError):
            raise ParseError(f"bad {what} entry {key!r} = {value!r}", path=path) from None
    return dict(sorted(out.items()))


def parse_app_meta(text: str, *, path: str | None = None) -> ApplicationMeta:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(str(exc), path=path) from None
    raw_i = _require(doc, "intensity", "", path)
    try:
        if isinstance(raw_i, dict):
            intensity = IntensityLaw(float(raw_i["coefficient"]), float(raw_i.get("exponent", 0.0)))
        else:
            intensity = float(raw_i)
        return ApplicationMeta(
            name=str(doc.get("name", Path(path).stem if path else "application")),
            intensity=intensity,
            mix=OpMix(doc.get("mix", [])),
            speedup_samples=_int_keyed(doc.get("speedup", {}), "speedup", path),
            parallel_fraction=(
                float(doc["parallel_fraction"]) if "parallel_fraction" in doc else None
            ),
            betas=_betas_from_toml(doc.get("beta", {}), path),
            energy_samples=_int_keyed(doc.get("energy_mj", {}), "energy_mj", path),
            baseline_time=float(doc["baseline_time_s"]) if "baseline_time_s" in doc else None,
        )
    except (TypeError, ValueError, KeyError) as exc:
        raise ParseError(f"invalid application metadata: {exc}", path=path) from None


def format_app_meta(meta: ApplicationMeta) -> str:
    doc: dict = {"name": meta.name}
    if isinstance(meta.intensity, IntensityLaw):
        doc["intensity"] = {
            "coefficient": meta.intensity.coefficient,
            "exponent": meta.intensity.exponent,
        }
    else:
        doc["intensity"] = float(meta.intensity)
    doc["mix"] = list(meta.mix.ops)
    if meta.parallel_fraction is not None:
        doc["parallel_fraction"] = meta.parallel_fraction
    if meta.baseline_time is not None:
        doc["baseline_time_s"] = meta.baseline_time
    if meta.speedup_samples:
        doc["speedup"] = {str(n): float(s) for n, s in sorted(meta.speedup_samples.items())}
    if meta.energy_samples:
        doc["energy_mj"] = {str(n): float(e) for n, e in sorted(meta.energy_samples.items())}
    if meta.betas:
        doc["beta"] = _betas_to_toml(meta.betas)
    return tomli_w.dumps(doc)


def read_app_meta(path) -> ApplicationMeta:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(str(exc), path=str(path)) from None
    return parse_app_meta(text, path=str(path))


def read_table(path) -> list[dict[str, str]]:
    """Rows of a comma-separated data table with ``#`` comment lines."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [line for _, line in _uncommented(text.splitlines())]
    return [
        {k.strip(): v.strip() for k, v in row.items()}
        for row in csv.DictReader(lines)
    ]


def write_app_meta(path, meta: ApplicationMeta) -> None:
    Path(path).write_text(format_app_meta(meta), encoding="utf-8")
