"""
Text formats for signals and results.

Series files carry an optional ``# sample_rate_hz=<r>`` header followed by
either one value per line or ``t,value`` pairs. Numbers are written with 12
significant digits.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DomainError
from .signal_core import TimeSeries

_RATE_HEADER = re.compile(r"^#\s*sample_rate_hz\s*=\s*(\S+)\s*$")
UNIFORM_RTOL = 1e-6


class SignalFormatError(DomainError):
    pass


def fmt(v: float) -> str:
    return f"{float(v):.12g}"


def _parse_float(text: str, lineno: int, path) -> float:
    try:
        return float(text)
    except ValueError:
        raise SignalFormatError(f"{path}:{lineno}: malformed value {text.strip()!r}") from None


def load_signal(path, sample_rate_override: Optional[float] = None) -> TimeSeries:
    """Read a series file.

    The sample rate comes from ``sample_rate_override``, else the header,
    else the spacing of the time column (which must then be uniform).
    A first data line made only of non-numeric fields is taken as column
    names and skipped.
    """
    path = Path(path)
    header_rate = None
    times: list[float] = []
    values: list[float] = []
    ncols = None
    seen_data = False
    with path.open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = _RATE_HEADER.match(line)
                if m:
                    header_rate = _parse_float(m.group(1), lineno, path)
                continue
            fields = [f.strip() for f in line.split(",")]
            if not seen_data and not any(_is_number(f) for f in fields):
                seen_data = True
                continue
            seen_data = True
            if len(fields) not in (1, 2):
                raise SignalFormatError(f"{path}:{lineno}: expected 1 or 2 columns, got {len(fields)}")
            if ncols is None:
                ncols = len(fields)
            elif len(fields) != ncols:
                raise SignalFormatError(f"{path}:{lineno}: expected {ncols} columns, got {len(fields)}")
            nums = [_parse_float(f, lineno, path) for f in fields]
            if ncols == 2:
                times.append(nums[0])
            values.append(nums[-1])

    if not values:
        raise SignalFormatError(f"{path}: no samples")

    t0 = 0.0
    inferred = None
    if times:
        t = np.asarray(times)
        t0 = float(t[0])
        if t.size > 1:
            dt = np.diff(t)
            step = float(np.median(dt))
            if step <= 0 or np.max(np.abs(dt - step)) > UNIFORM_RTOL * step:
                raise SignalFormatError(f"{path}: non-uniform grid in the time column")
            inferred = 1.0 / step

    rate = sample_rate_override or header_rate or inferred
    if rate is None:
        raise SignalFormatError(f"{path}: sample rate missing; add a header or pass a rate")
    return TimeSeries(np.asarray(values), rate, t0)


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def series_lines(ts: TimeSeries) -> Iterable[str]:
    yield f"# sample_rate_hz={fmt(ts.sample_rate)}\n"
    for t, v in zip(ts.times, ts.samples):
        yield f"{fmt(t)},{fmt(v)}\n"


def write_series(path, ts: TimeSeries, fmt_name: str = "csv") -> Path:
    path = Path(path)
    if fmt_name == "jsonl":
        path = path.with_suffix(".jsonl")
        rows = [json.dumps({"sample_rate_hz": ts.sample_rate, "t0": ts.t0})]
        rows += [json.dumps({"t": float(fmt(t)), "value": float(fmt(v))}) for t, v in zip(ts.times, ts.samples)]
        path.write_text("\n".join(rows) + "\n")
    else:
        with path.open("w", newline="\n") as fh:
            fh.writelines(series_lines(ts))
    return path


def write_table(path, columns: Sequence[str], rows: Iterable[Sequence[float]], fmt_name: str = "csv") -> Path:
    """Write a numeric table; CSV files get a ``# columns=...`` comment line."""
    path = Path(path)
    if fmt_name == "jsonl":
        path = path.with_suffix(".jsonl")
        with path.open("w", newline="\n") as fh:
            for row in rows:
                fh.write(json.dumps({c: float(fmt(v)) for c, v in zip(columns, row)}) + "\n")
    else:
        with path.open("w", newline="\n") as fh:
            fh.write(f"# columns={','.join(columns)}\n")
            for row in rows:
                fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def write_jsonl(path, records: Iterable[dict]) -> Path:
    path = Path(path)
    with path.open("w", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return path
