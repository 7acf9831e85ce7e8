"""CSV/JSON serialisation of solver traces, bench summaries and probe reports.

Floats are written with 17 significant digits (``%.17g``), so a value read
back compares equal to the one written; infinities are written as ``inf``.
"""
from __future__ import annotations

import csv
import json
import math
from typing import Iterable, Sequence

from .solvers import IterationRecord, SolveResult

TRACE_COLUMNS = ("t", "g_value", "f_bar_value", "rgrad_norm", "min_coord", "bound_term", "wall_ns")
SUMMARY_COLUMNS = ("solver", "status", "iterations", "final_f_bar", "wall_ns")
REPORT_COLUMNS = ("name", "samples", "worst_violation", "threshold", "pass")


def fmt(v: float) -> str:
    v = float(v)
    if math.isnan(v):
        raise ValueError("NaN cannot be written to a trace")
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return "%.17g" % v


def write_trace(path, records: Iterable[IterationRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(TRACE_COLUMNS)
        for r in records:
            w.writerow([r.t, fmt(r.g_value), fmt(r.f_bar_value), fmt(r.rgrad_norm),
                        fmt(r.min_coord), fmt(r.bound_term), r.wall_ns])


def read_trace(path) -> list[IterationRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != TRACE_COLUMNS:
            raise ValueError(f"unexpected trace header {header!r}")
        out = []
        for row in reader:
            out.append(IterationRecord(
                t=int(row[0]), g_value=float(row[1]), f_bar_value=float(row[2]),
                rgrad_norm=float(row[3]), min_coord=float(row[4]),
                bound_term=float(row[5]), wall_ns=int(row[6])))
    return out


def write_summary(path, results: Sequence[SolveResult]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(SUMMARY_COLUMNS)
        for r in results:
            w.writerow([r.solver, r.status, r.iterations, fmt(r.f_value), r.trace[-1].wall_ns])


def write_reports(path, reports) -> None:
    """Write probe reports as JSON (``.json``) or CSV (anything else)."""
    rows = [r.as_dict() for r in reports]
    if str(path).endswith(".json"):
        plain = [{k: fmt(v) if isinstance(v, float) and not math.isfinite(v) else v
                  for k, v in d.items()} for d in rows]
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(plain, fh, indent=1, allow_nan=False)
            fh.write("\n")
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(REPORT_COLUMNS)
        for d in rows:
            w.writerow([d["name"], d["samples"], fmt(d["worst_violation"]),
                        fmt(d["threshold"]), "true" if d["pass"] else "false"])
