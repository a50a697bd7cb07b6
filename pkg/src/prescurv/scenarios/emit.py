"""Report serialisation: JSON for full reports, CSV for point tables."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .runner import Report

__all__ = ["to_json", "to_csv", "emit"]


def _clean(x):
    """Plain JSON values; non-finite floats become the strings "inf", "-inf", "nan"."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_clean(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return x


def to_json(report: Report) -> str:
    """Deterministic JSON: fixed key order, shortest round-trip float text."""
    return json.dumps(_clean(report.as_dict()), indent=2, allow_nan=False) + "\n"


def to_csv(report: Report) -> str:
    """The point table: ``x1..xn, scalar, ric_11..ric_nn, K_ij`` with 17 significant digits."""
    if not report.table:
        raise ValueError(f"a {report.task} report has no point table; use the json format")
    cols = list(report.table)
    rows = zip(*(report.table[c] for c in cols))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in rows:
        w.writerow([format(float(v), ".17g") for v in row])
    return buf.getvalue()


def emit(report: Report, fmt: str = "json", path=None) -> str:
    """Render the report; write it to ``path`` when given.  Returns the text."""
    if fmt == "json":
        text = to_json(report)
    elif fmt == "csv":
        text = to_csv(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        path = Path(path)
        try:
            path.write_text(text)
        except OSError as exc:
            raise OSError(exc.errno, f"cannot write report: {exc.strerror}", str(path)) from exc
    return text
