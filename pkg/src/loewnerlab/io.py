"""CSV/JSON serialization of traces and tables (17 significant digits)."""
from __future__ import annotations

import csv
import io
import json

import numpy as np

from .trace import Trace

FMT = "%.17g"
TRACE_HEADER = ["t", "re", "im", "acc"]


def fmt(x):
    return FMT % float(x)


def write_table(header, columns, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in zip(*columns):
        w.writerow([fmt(v) for v in row])


def trace_columns(tr: Trace):
    return [tr.times, tr.points.real, tr.points.imag, tr.accuracy]


def trace_to_csv(tr: Trace) -> str:
    buf = io.StringIO()
    write_table(TRACE_HEADER, trace_columns(tr), buf)
    return buf.getvalue()


def trace_to_json(tr: Trace) -> str:
    obj = {k: [float(v) for v in col] for k, col in zip(TRACE_HEADER, trace_columns(tr))}
    obj["driver_offset"] = float(tr.driver_offset)
    return json.dumps(obj)


def trace_from_csv(text: str) -> Trace:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != TRACE_HEADER:
        raise ValueError(f"trace CSV must start with header {','.join(TRACE_HEADER)}")
    data = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    if data.size == 0:
        raise ValueError("trace CSV has no rows")
    return Trace(data[:, 0], data[:, 1] + 1j * data[:, 2], 0.0, data[:, 3])


def trace_from_json(text: str) -> Trace:
    obj = json.loads(text)
    t = np.asarray(obj["t"], dtype=float)
    pts = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
    return Trace(t, pts, float(obj.get("driver_offset", 0.0)), np.asarray(obj["acc"], dtype=float))


def load_trace(path: str) -> Trace:
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return trace_from_json(text)
    return trace_from_csv(text)
