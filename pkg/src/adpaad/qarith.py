"""Emulated reversible fixed-point arithmetic.

Each function acts on basis-valued registers, so it is evaluated directly on
the stored values: exact real result, then one rounding to the register
format (nearest, ties to even). All functions accept scalars or numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HALF_OPEN = "half_open"
PAPER_LITERAL = "paper_literal"
MEMBERSHIP_MODES = (HALF_OPEN, PAPER_LITERAL)


class FixedPointOverflow(OverflowError):
    pass


@dataclass(frozen=True)
class FixedPointFormat:
    total_bits: int = 32
    frac_bits: int = 16
    signed: bool = True

    def __post_init__(self) -> None:
        if self.frac_bits < 0 or self.total_bits < self.frac_bits + 1:
            raise ValueError(
                f"invalid fixed-point format: total_bits={self.total_bits}, frac_bits={self.frac_bits}")

    @property
    def resolution(self) -> float:
        return 2.0 ** -self.frac_bits

    @property
    def raw_min(self) -> int:
        return -(1 << (self.total_bits - 1)) if self.signed else 0

    @property
    def raw_max(self) -> int:
        return (1 << (self.total_bits - 1)) - 1 if self.signed else (1 << self.total_bits) - 1

    @property
    def max_value(self) -> float:
        return self.raw_max * self.resolution

    @property
    def min_value(self) -> float:
        return self.raw_min * self.resolution

    def to_raw(self, value):
        raw = np.rint(np.asarray(value, dtype=np.float64) * (1 << self.frac_bits))
        if np.any(raw > self.raw_max) or np.any(raw < self.raw_min) or np.any(~np.isfinite(raw)):
            raise FixedPointOverflow(
                f"value out of range [{self.min_value}, {self.max_value}] for {self}")
        return raw

    def quantize(self, value):
        """Round to the nearest representable value (ties to even)."""
        out = self.to_raw(value) / (1 << self.frac_bits)
        return float(out) if np.ndim(out) == 0 else out

    def representable(self, value) -> bool:
        try:
            return bool(np.all(self.quantize(value) == np.asarray(value)))
        except FixedPointOverflow:
            return False


DEFAULT_FORMAT = FixedPointFormat()


def qma_rho(x, a_lo, a_hi, fmt: FixedPointFormat = DEFAULT_FORMAT):
    """Product ``(x - a_lo)(x - a_hi)``; nonpositive iff ``x`` lies in the closed interval."""
    x = np.asarray(x, dtype=np.float64)
    return fmt.quantize((x - a_lo) * (x - a_hi))


def membership(x, bounds, t: int, mode: str = HALF_OPEN,
               fmt: FixedPointFormat = DEFAULT_FORMAT) -> int:
    """Membership bit of ``x`` in subsection ``t`` (1-based)."""
    q = len(bounds) - 1
    if not 1 <= t <= q:
        raise ValueError(f"subsection {t} outside 1..{q}")
    bit = member_flags(x, bounds[t - 1], bounds[t], t == q, mode, fmt)
    return int(bit)


def member_flags(x, a_lo, a_hi, is_last, mode: str = HALF_OPEN,
                 fmt: FixedPointFormat = DEFAULT_FORMAT):
    """Vectorised membership test used by the state-preparation stage."""
    if mode == PAPER_LITERAL:
        return qma_rho(x, a_lo, a_hi, fmt) <= 0
    if mode != HALF_OPEN:
        raise ValueError(f"unknown membership mode {mode!r}; expected one of {MEMBERSHIP_MODES}")
    x = np.asarray(x, dtype=np.float64)
    upper = np.where(is_last, x <= a_hi, x < a_hi)
    return (a_lo <= x) & upper


def subtract(u, v, fmt: FixedPointFormat = DEFAULT_FORMAT):
    return fmt.quantize(np.asarray(u, dtype=np.float64) - v)


def sine_square_scale(theta_frac, C: float, fmt: FixedPointFormat = DEFAULT_FORMAT):
    """``C sin^2(pi theta_frac)`` for a phase register value in ``[0, 1)``.

    The phase is folded onto ``[0, 1/2]`` first so the two estimation
    branches ``f`` and ``1 - f`` give bit-identical results.
    """
    f = np.asarray(theta_frac, dtype=np.float64)
    if np.any(f < 0) or np.any(f >= 1):
        raise ValueError("phase fraction must lie in [0, 1)")
    f = np.minimum(f, 1.0 - f)
    return fmt.quantize(C * np.sin(math.pi * f) ** 2)


def sine_scale(theta_frac, fmt: FixedPointFormat = DEFAULT_FORMAT):
    """``sin(pi theta_frac)`` with the same branch folding as :func:`sine_square_scale`."""
    f = np.asarray(theta_frac, dtype=np.float64)
    if np.any(f < 0) or np.any(f >= 1):
        raise ValueError("phase fraction must lie in [0, 1)")
    f = np.minimum(f, 1.0 - f)
    return fmt.quantize(np.sin(math.pi * f))


def divide(num, den, fmt: FixedPointFormat = DEFAULT_FORMAT):
    den = np.asarray(den, dtype=np.float64)
    if np.any(den == 0):
        raise ZeroDivisionError("fixed-point division by zero")
    return fmt.quantize(np.asarray(num, dtype=np.float64) / den)


def compare_ge(h, delta):
    out = np.asarray(h) >= np.asarray(delta)
    return int(out) if out.ndim == 0 else out.astype(np.int8)
