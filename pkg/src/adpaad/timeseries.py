"""Sequence ingestion, sliding windows and amplitude-domain subsections.

Subsequence and subsection numbers are 1-based wherever they are exposed as
labels (``t`` from :func:`assign_subsection`, anomaly indices); array axes are
0-based.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np


class SeriesError(ValueError):
    """Raised for unreadable or invalid input series."""


@dataclass(frozen=True)
class TimeSeries:
    samples: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.samples) == 0:
            raise SeriesError("empty series")
        for pos, v in enumerate(self.samples, start=1):
            if not math.isfinite(v):
                raise SeriesError(f"non-finite sample at position {pos}: {v!r}")

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "TimeSeries":
        return cls(tuple(float(v) for v in values))

    @property
    def m(self) -> int:
        return len(self.samples)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.samples, dtype=np.float64)

    def shifted(self, c: float) -> "TimeSeries":
        return TimeSeries(tuple(v + c for v in self.samples))

    def scaled(self, s: float) -> "TimeSeries":
        return TimeSeries(tuple(v * s for v in self.samples))


@dataclass(frozen=True)
class WindowPlan:
    n: int
    step: int = 1
    m: Optional[int] = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise SeriesError(f"window length must be >= 1, got {self.n}")
        if self.step < 1:
            raise SeriesError(f"stride must be >= 1, got {self.step}")
        if self.m is not None and self.n > self.m:
            raise SeriesError(f"window length {self.n} exceeds series length {self.m}")

    @classmethod
    def for_series(cls, ts: TimeSeries, n: int, step: int = 1) -> "WindowPlan":
        return cls(n=n, step=step, m=ts.m)

    @property
    def K(self) -> int:
        if self.m is None:
            raise SeriesError("plan is not bound to a series length")
        return (self.m - self.n) // self.step + 1


@dataclass(frozen=True)
class SubsectionPlan:
    """Per-subsequence amplitude domains and subsection bounds.

    ``bounds`` has shape ``(K, q + 1)``; row ``i`` holds ``a_i^0 .. a_i^q``.
    """

    L: np.ndarray
    H: np.ndarray
    bounds: np.ndarray

    @property
    def q(self) -> int:
        return self.bounds.shape[1] - 1

    @property
    def K(self) -> int:
        return self.bounds.shape[0]


def load_series(path, column: Optional[str] = None) -> TimeSeries:
    """Read a single-column CSV of numbers, with an optional one-line header.

    With ``column`` given, the file may have several columns and the header
    selects which one to read.
    """
    path = Path(path)
    if not path.exists():
        raise SeriesError(f"input file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise SeriesError(f"empty series in {path}")

    col = 0
    start = 0
    if column is not None:
        header = [c.strip() for c in rows[0]]
        if column not in header:
            raise SeriesError(f"column {column!r} not in header {header}")
        col = header.index(column)
        start = 1
    elif not _is_number(rows[0][0]):
        start = 1

    values = []
    for rowno, row in enumerate(rows[start:], start=start + 1):
        cell = row[col].strip() if col < len(row) else ""
        if not _is_number(cell):
            raise SeriesError(f"non-numeric value {cell!r} at row {rowno}")
        v = float(cell)
        if not math.isfinite(v):
            raise SeriesError(f"non-finite value {cell!r} at row {rowno}")
        values.append(v)
    if not values:
        raise SeriesError(f"empty series in {path}")
    return TimeSeries(tuple(values))


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def subsequences(ts: TimeSeries, plan: WindowPlan) -> np.ndarray:
    """Return the ``K x n`` matrix whose rows are the windows ``X_1..X_K``."""
    if plan.n > ts.m:
        raise SeriesError(f"window length {plan.n} exceeds series length {ts.m}")
    x = ts.as_array()
    K = (ts.m - plan.n) // plan.step + 1
    starts = np.arange(K) * plan.step
    return x[starts[:, None] + np.arange(plan.n)[None, :]]


def amplitude_domain(window) -> tuple[float, float]:
    w = np.asarray(window, dtype=np.float64)
    if w.size == 0:
        raise SeriesError("empty subsequence")
    return float(w.min()), float(w.max())


def subsection_bounds(L: float, H: float, q: int) -> list[float]:
    """Equal-width bounds ``a^t = L + t (H - L) / q`` with ``a^q`` pinned to ``H``."""
    if q < 1:
        raise SeriesError(f"subsection count must be >= 1, got {q}")
    if H < L:
        raise SeriesError(f"upper bound {H} below lower bound {L}")
    width = H - L
    bounds = [L + t * width / q for t in range(q)]
    bounds.append(H)
    return bounds


def assign_subsection(x: float, bounds: Sequence[float]) -> int:
    """Subsection number ``t`` (1-based) holding ``x``.

    Intervals are half-open ``[a^{t-1}, a^t)`` except the last, which is
    closed so that ``x = H`` is assigned. A degenerate domain maps to ``q``.
    """
    q = len(bounds) - 1
    if not bounds[0] <= x <= bounds[q]:
        raise SeriesError(f"value {x} outside amplitude domain [{bounds[0]}, {bounds[q]}]")
    for t in range(1, q):
        if x < bounds[t]:
            return t
    return q


def plan_subsections(windows: np.ndarray, q: int) -> SubsectionPlan:
    if q < 1:
        raise SeriesError(f"subsection count must be >= 1, got {q}")
    if q > windows.shape[1]:
        raise SeriesError(f"subsection count {q} exceeds window length {windows.shape[1]}")
    L = windows.min(axis=1)
    H = windows.max(axis=1)
    bounds = np.array([subsection_bounds(float(lo), float(hi), q) for lo, hi in zip(L, H)])
    return SubsectionPlan(L=L, H=H, bounds=bounds)
