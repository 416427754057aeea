"""CSV and JSON renderings of sweep reports.

Both formats are deterministic: rows arrive in (e, k, i) order and the
only JSON fields that vary between runs are ``duration_ms`` and the
echoed ``jobs`` setting.
"""
from __future__ import annotations

import csv
import json
import math
from typing import IO, Iterable, List, Optional

from . import __version__
from .harness import BoundCheckRow, SweepReport

CSV_HEADER = ["e", "k", "i", "nu", "bound", "slack", "equal"]
JSON_KEYS = ["check", "params", "engine", "precision", "jobs", "rows_total",
             "violations", "equality_cases", "duration_ms", "artifact_version"]


def render_valuation(v) -> str:
    if v == math.inf:
        return "inf"
    if v == -math.inf:
        return "-inf"
    return str(int(v))


def _json_valuation(v):
    return render_valuation(v) if math.isinf(v) else int(v)


def csv_fields(row: BoundCheckRow) -> List[str]:
    return [str(row.e), str(row.k), "" if row.i is None else str(row.i),
            render_valuation(row.observed), render_valuation(row.bound),
            render_valuation(row.slack), "1" if row.is_equality else "0"]


def row_dict(row: BoundCheckRow) -> dict:
    return {
        "e": row.e,
        "k": row.k,
        "i": row.i,
        "nu": _json_valuation(row.observed),
        "bound": _json_valuation(row.bound),
        "slack": _json_valuation(row.slack),
        "equal": 1 if row.is_equality else 0,
    }


class CsvRowWriter:
    """Streams rows to a CSV file as they are produced."""

    def __init__(self, stream: IO[str], equality_only: bool = False):
        self._writer = csv.writer(stream, lineterminator="\n")
        self._writer.writerow(CSV_HEADER)
        self.equality_only = equality_only

    def __call__(self, row: BoundCheckRow) -> None:
        if self.equality_only and not row.is_equality:
            return
        self._writer.writerow(csv_fields(row))


def write_csv(rows: Iterable[BoundCheckRow], stream: IO[str], equality_only: bool = False) -> None:
    writer = CsvRowWriter(stream, equality_only)
    for row in rows:
        writer(row)


def report_dict(report: SweepReport, check_name: Optional[str] = None) -> dict:
    out = {
        "check": check_name or report.check,
        "params": {"e_min": report.params["e_min"], "e_max": report.params["e_max"]},
        "engine": report.engine,
        "precision": report.precision,
        "jobs": report.jobs,
        "rows_total": report.rows_total,
        "violations": [row_dict(r) for r in report.violations],
        "equality_cases": [row_dict(r) for r in report.equality_cases],
        "duration_ms": report.duration_ms,
        "artifact_version": __version__,
    }
    assert list(out) == JSON_KEYS
    return out


def to_json(report: SweepReport, check_name: Optional[str] = None) -> str:
    return json.dumps(report_dict(report, check_name), indent=2) + "\n"
