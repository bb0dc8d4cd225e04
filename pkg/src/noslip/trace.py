"""Time-stamped event/sample traces and their CSV serialization.

CSV layout: '#'-prefixed header comments carrying the resolved configuration
as JSON (so a file is self-describing and re-runnable), one column-name row,
then data rows with floats printed at 17 significant digits (lossless double
round-trip).
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import DomainError

__all__ = ["EventTrace", "write_trace", "read_trace", "events_to_trace"]

_FMT = "%.17g"


class EventTrace:
    """Column-oriented table of trace rows plus run metadata."""

    def __init__(self, columns, meta=None, terminal="events"):
        self.columns = list(columns)
        self.meta = dict(meta or {})
        self.terminal = terminal
        self.rows: list[list[float]] = []

    def append(self, row):
        if len(row) != len(self.columns):
            raise DomainError(
                f"row has {len(row)} fields, trace has {len(self.columns)} columns"
            )
        self.rows.append([float(v) for v in row])

    def column(self, name):
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])

    def __len__(self):
        return len(self.rows)

    def __eq__(self, other):
        if not isinstance(other, EventTrace):
            return NotImplemented
        if self.columns != other.columns or self.terminal != other.terminal:
            return False
        if self.meta != other.meta or len(self.rows) != len(other.rows):
            return False
        for a, b in zip(self.rows, other.rows):
            for x, y in zip(a, b):
                if x != y and not (math.isnan(x) and math.isnan(y)):
                    return False
        return True


def write_trace(trace: EventTrace, path):
    """Write a trace as self-describing CSV; deterministic byte output."""
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write("# noslip-trace v1\n")
            fh.write("# config: " + json.dumps(trace.meta, sort_keys=True) + "\n")
            fh.write(f"# terminal: {trace.terminal}\n")
            fh.write(",".join(trace.columns) + "\n")
            for row in trace.rows:
                fh.write(",".join(_FMT % v for v in row) + "\n")
    except OSError as e:
        raise OSError(f"cannot write trace to {path!r}: {e}") from e


def read_trace(path) -> EventTrace:
    """Inverse of :func:`write_trace`; parse(write(trace)) == trace."""
    meta = {}
    terminal = "events"
    columns = None
    rows = []
    try:
        with open(path) as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                if line.startswith("#"):
                    body = line[1:].strip()
                    if body.startswith("config:"):
                        meta = json.loads(body[len("config:"):])
                    elif body.startswith("terminal:"):
                        terminal = body[len("terminal:"):].strip()
                    continue
                if columns is None:
                    columns = line.split(",")
                    continue
                rows.append([float(v) for v in line.split(",")])
    except OSError as e:
        raise OSError(f"cannot read trace from {path!r}: {e}") from e
    if columns is None:
        raise DomainError(f"{path!r} contains no column header")
    tr = EventTrace(columns, meta, terminal)
    for r in rows:
        tr.append(r)
    return tr


_COLS_2D = [
    "t", "event", "wall", "x1", "x2", "u1", "u2", "s",
    "u_hat", "u_bar_abs", "W_abs", "s_bar", "E", "chord_d",
]
_COLS_3D = [
    "t", "event", "wall", "x1", "x2", "x3", "u1", "u2", "u3",
    "S12", "S13", "S23", "u_hat", "u_bar_abs", "W_abs", "s_bar", "E", "chord_d",
]


def events_to_trace(events, dim, meta=None, terminal="events") -> EventTrace:
    """Flatten billiard event dicts into the fixed per-dimension CSV schema."""
    if dim == 2:
        tr = EventTrace(_COLS_2D, meta, terminal)
        for e in events:
            tr.append(
                [
                    e["t"], e["event"], e["wall"], e["x"][0], e["x"][1],
                    e["u"][0], e["u"][1], e["s"], e["u_hat"], e["u_bar_abs"],
                    e["W_abs"], e["s_bar"], e["E"], e["chord_d"],
                ]
            )
        return tr
    if dim == 3:
        tr = EventTrace(_COLS_3D, meta, terminal)
        for e in events:
            S = e["S"]
            tr.append(
                [
                    e["t"], e["event"], e["wall"], e["x"][0], e["x"][1], e["x"][2],
                    e["u"][0], e["u"][1], e["u"][2], S[0, 1], S[0, 2], S[1, 2],
                    e["u_hat"], e["u_bar_abs"], e["W_abs"], e["s_bar"], e["E"],
                    e["chord_d"],
                ]
            )
        return tr
    raise DomainError(f"unsupported dimension {dim}")
