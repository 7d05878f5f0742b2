"""CSV / JSON serialization of result rows.

Floats are written with ``repr`` (shortest string that round-trips, at most
17 significant digits); infinity is written as ``inf`` and NaN as ``nan`` in
CSV.  JSON uses the same field names, ``"inf"`` for infinity, ``null`` for
NaN, and an ordered id array for route paths.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import astuple, fields
from pathlib import Path
from typing import Sequence

from .sweep import INTERSECTION_COLUMNS, ROUTE_COLUMNS, ResultRow, RouteRow

__all__ = ["emit_results", "load_results", "PATH_SEP"]

PATH_SEP = ">"


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return repr(v)
    if isinstance(v, tuple):
        return PATH_SEP.join(str(x) for x in v)
    return str(v)


def _json_cell(v):
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return None
    if isinstance(v, tuple):
        return list(v)
    return v


def emit_results(rows: Sequence[ResultRow | RouteRow], fmt: str = "csv",
                 path: str | Path | None = None) -> str:
    """Serialize ``rows``; also write them to ``path`` when given."""
    if not rows:
        raise ValueError("no rows to emit")
    names = [f.name for f in fields(rows[0])]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(names)
        for r in rows:
            w.writerow([_csv_cell(v) for v in astuple(r)])
        text = buf.getvalue()
    elif fmt == "json":
        payload = [{n: _json_cell(v) for n, v in zip(names, astuple(r))} for r in rows]
        text = json.dumps(payload, indent=2) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def _float(s) -> float:
    if s is None:
        return math.nan
    return float(s)


def _path_ids(parts) -> tuple:
    return tuple(int(p) if isinstance(p, str) and p.lstrip("-").isdigit() else p for p in parts)


def _row(rec: dict) -> ResultRow | RouteRow:
    if "path" in rec:
        path = rec["path"]
        if isinstance(path, str):
            path = path.split(PATH_SEP) if path else []
        return RouteRow(rec["swept_param"], _float(rec["value"]), rec["mode"], _path_ids(path),
                        _float(rec["total_delay"]), _float(rec["true_delay"]),
                        rec["reachable"] in (True, "true"))
    return ResultRow(
        rec["swept_param"], _float(rec["value"]), rec["model"], _float(rec["p_t"]),
        _float(rec["rho"]), _float(rec["W_analytic"]), _float(rec["W_sim_mean"]),
        _float(rec["W_sim_stderr"]), _float(rec["queue_len_mean"]),
        rec["stable"] in (True, "true"), rec["saturated"] in (True, "true"))


def load_results(text: str, fmt: str = "csv") -> list[ResultRow | RouteRow]:
    """Inverse of :func:`emit_results`."""
    if fmt == "json":
        return [_row(rec) for rec in json.loads(text)]
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames not in (list(INTERSECTION_COLUMNS), list(ROUTE_COLUMNS)):
        raise ValueError(f"unexpected header {reader.fieldnames}")
    return [_row(rec) for rec in reader]
