"""Atomic file output and CSV helpers (floats written with 17 significant digits)."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

from . import grid
from .diagnostics import CSV_COLUMNS, DiagnosticsRecord


def fmt_float(x) -> str:
    return f"{float(x):.17g}"


def atomic_write_text(path, text: str) -> Path:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _json_clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_clean(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return _json_clean(obj.item())
    return obj


def dumps_json(obj) -> str:
    # non-finite floats become null so the output is strict JSON
    return json.dumps(_json_clean(obj), indent=2) + "\n"


def write_json(path, obj) -> Path:
    return atomic_write_text(path, dumps_json(obj))


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    for row in rows:
        wr.writerow([fmt_float(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def diagnostics_csv(records) -> str:
    return csv_text(CSV_COLUMNS, (r.row() for r in records))


def read_diagnostics_csv(path) -> list[DiagnosticsRecord]:
    with open(path, newline="") as fh:
        return [DiagnosticsRecord.from_row(row) for row in csv.DictReader(fh)]


def read_csv_columns(path) -> dict[str, list[str]]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        return {}
    return {k: [r[k] for r in rows] for k in rows[0]}


def field_csv(f, domain: grid.Domain) -> str:
    header = ["x", "value"] if domain.dim == 1 else ["x", "y", "value"]
    return csv_text(header, ([float(c) for c in row] for row in grid.field_to_csv_rows(f, domain)))
