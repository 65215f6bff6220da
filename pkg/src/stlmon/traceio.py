"""CSV trace files and robustness series.

Traces travel as plain comma-separated text: one header line naming the
columns, then one row of decimal numbers per line.  Blank lines and lines
starting with ``#`` are skipped.  A leading ``time`` column is optional for
discrete traces (indices are implicit when it is absent) and required for
dense ones, where it carries the event times.

Numbers are written with ``repr``, the shortest digit string that parses
back to the same float, so a written file reads back exactly, poles
included (``inf`` / ``-inf``).
"""

from __future__ import annotations

import csv

from .core import (
    Duration,
    ExtReal,
    NonMonotoneTimeError,
    NonUniformTimeError,
    TraceFormatError,
)
from .oracle import DiscreteTrace

__all__ = [
    "read_discrete_trace",
    "read_dense_batches",
    "read_series",
    "write_series",
]


def _rows(path):
    """Parsed CSV rows as (line number, fields), comments stripped."""
    with open(path, newline="", encoding="utf-8") as fh:
        numbered = [
            (n, line) for n, line in enumerate(fh, start=1)
            if line.strip() and not line.lstrip().startswith("#")
        ]
    parsed = csv.reader(line for _n, line in numbered)
    return [(n, fields) for (n, _line), fields in zip(numbered, parsed)]


def _header(rows, path):
    if not rows:
        raise TraceFormatError(f"{path}: empty trace file")
    lineno, fields = rows[0]
    names = [c.strip() for c in fields]
    if any(not c for c in names):
        raise TraceFormatError("blank column name", row=lineno)
    seen = set()
    for c in names:
        if c in seen:
            raise TraceFormatError(f"duplicate column {c!r}", row=lineno)
        seen.add(c)
    return names, rows[1:]


def _number(text, lineno):
    try:
        return float(text)
    except ValueError:
        raise TraceFormatError(f"bad number {text!r}", row=lineno) from None


def _tick_seconds(period: Duration) -> float:
    if period.is_samples:
        return float(period.magnitude)
    return float(period.to_seconds())


def read_discrete_trace(path, period: Duration = Duration.samples(1)):
    """Read equal-length sample columns, checked against a clock.

    With a leading ``time`` column, row k must sit at k times the period,
    to one part in 1e9; without one, indices are implicit.
    """
    names, body = _header(_rows(path), path)
    timed = names[0] == "time"
    variables = names[1:] if timed else names
    if not variables:
        raise TraceFormatError(f"{path}: no variable columns")
    tick = _tick_seconds(period)
    columns = {name: [] for name in variables}
    for k, (lineno, fields) in enumerate(body):
        if len(fields) != len(names):
            raise TraceFormatError(
                f"expected {len(names)} fields, found {len(fields)}",
                row=lineno)
        values = [_number(f, lineno) for f in fields]
        if timed:
            expected = k * tick
            slack = 1e-9 * max(abs(values[0]), abs(expected))
            if abs(values[0] - expected) > slack:
                raise NonUniformTimeError(
                    f"time {values[0]} where the clock says {expected}",
                    row=lineno)
            values = values[1:]
        for name, v in zip(variables, values):
            columns[name].append(v)
    return DiscreteTrace(columns, period)


def read_dense_batches(path):
    """Read an event file into update batches, one (variable, events) pair
    per column, ready to feed a dense monitor."""
    names, body = _header(_rows(path), path)
    if names[0] != "time":
        raise TraceFormatError(
            f"{path}: dense traces need a leading time column")
    variables = names[1:]
    if not variables:
        raise TraceFormatError(f"{path}: no variable columns")
    events = {name: [] for name in variables}
    last = None
    for lineno, fields in body:
        if len(fields) != len(names):
            raise TraceFormatError(
                f"expected {len(names)} fields, found {len(fields)}",
                row=lineno)
        values = [_number(f, lineno) for f in fields]
        t = values[0]
        if last is not None and t <= last:
            raise NonMonotoneTimeError(
                f"row {lineno}: time {t} does not advance past {last}")
        last = t
        for name, v in zip(variables, values[1:]):
            events[name].append((t, v))
    return [(name, events[name]) for name in variables]


def write_series(path, series) -> None:
    """Write per-formula (time, value) lists as one table.

    Formulas that changed at different moments are resampled onto the
    union of their times, carrying the previous value forward, so every
    row is fully populated.
    """
    names = list(series)
    grid = sorted({t for points in series.values() for t, _v in points})
    cursors = dict.fromkeys(names, 0)
    current = {}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["time"] + names)
        for t in grid:
            cells = [repr(float(t))]
            for name in names:
                points = series[name]
                i = cursors[name]
                while i < len(points) and points[i][0] <= t:
                    current[name] = points[i][1]
                    i += 1
                cursors[name] = i
                if name not in current:
                    raise ValueError(f"series {name!r} has no value at {t}")
                v = current[name]
                cells.append(repr(
                    v.as_float() if isinstance(v, ExtReal) else float(v)))
            out.writerow(cells)


def read_series(path):
    """Read a file written by write_series back into per-formula lists."""
    names, body = _header(_rows(path), path)
    if names[0] != "time":
        raise TraceFormatError(
            f"{path}: series files start with a time column")
    out = {name: [] for name in names[1:]}
    for lineno, fields in body:
        if len(fields) != len(names):
            raise TraceFormatError(
                f"expected {len(names)} fields, found {len(fields)}",
                row=lineno)
        values = [_number(f, lineno) for f in fields]
        for name, v in zip(names[1:], values[1:]):
            out[name].append((values[0], ExtReal.from_float(v)))
    return out
