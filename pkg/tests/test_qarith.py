import math

import numpy as np
import pytest

from adpaad import qarith
from adpaad.qarith import (
    HALF_OPEN,
    PAPER_LITERAL,
    FixedPointFormat,
    FixedPointOverflow,
    compare_ge,
    divide,
    membership,
    qma_rho,
    sine_scale,
    sine_square_scale,
    subtract,
)

FMT = FixedPointFormat()


def test_format_defaults():
    assert (FMT.total_bits, FMT.frac_bits, FMT.signed) == (32, 16, True)
    assert FMT.resolution == 2 ** -16
    assert FMT.max_value == pytest.approx(32768 - 2 ** -16)


def test_invalid_format():
    with pytest.raises(ValueError):
        FixedPointFormat(total_bits=8, frac_bits=8)


def test_ties_to_even():
    u = 2 ** -16
    assert FMT.quantize(0.5 * u) == 0.0
    assert FMT.quantize(1.5 * u) == 2 * u


def test_rho_values():
    assert qma_rho(2, 1, 2.5) == -0.5
    assert qma_rho(3, 1, 2.5) == 1.0
    assert qma_rho(1, 1, 2.5) == 0.0


def test_rho_overflow():
    with pytest.raises(FixedPointOverflow):
        qma_rho(300.0, 0.0, -300.0)


def test_membership_modes():
    b = [1, 2.5, 4]
    assert membership(2.5, b, 1, PAPER_LITERAL) == 1
    assert membership(2.5, b, 1, HALF_OPEN) == 0
    assert membership(2.5, b, 2, PAPER_LITERAL) == membership(2.5, b, 2, HALF_OPEN) == 1
    assert membership(2.0, b, 1, PAPER_LITERAL) == membership(2.0, b, 1, HALF_OPEN) == 1
    assert membership(4, b, 2, HALF_OPEN) == 1


def test_membership_bad_t():
    with pytest.raises(ValueError):
        membership(1.0, [0, 1], 2)


def test_modes_agree_off_bounds():
    rng = np.random.default_rng(1)
    b = np.array([0.0, 1.25, 2.5, 3.75, 5.0])
    x = rng.integers(0, 5 * 64 + 1, size=2000) / 64
    for t in range(1, 5):
        on_bound = np.isin(x, b[1:-1])
        a = qarith.member_flags(x, b[t - 1], b[t], t == 4, HALF_OPEN)
        p = qarith.member_flags(x, b[t - 1], b[t], t == 4, PAPER_LITERAL)
        assert np.array_equal(a[~on_bound], p[~on_bound])


def test_subtract():
    assert subtract(1.5, 2.5) == -1.0
    assert subtract(3.0, 3.0) == 0.0
    with pytest.raises(FixedPointOverflow):
        subtract(FMT.max_value, FMT.min_value)


def test_sine_square_scale():
    assert sine_square_scale(1 / 6, 6.0) == pytest.approx(1.5, abs=2 ** -16)
    assert sine_square_scale(0.0, 6.0) == 0.0
    assert sine_square_scale(5 / 6, 6.0) == sine_square_scale(1 / 6, 6.0)
    with pytest.raises(ValueError):
        sine_square_scale(1.0, 6.0)


def test_sine_scale_symmetry():
    f = np.arange(1, 256) / 256
    assert np.array_equal(sine_scale(f), sine_scale(1 - f))


def test_divide():
    assert divide(1 / 12, 2 / 27) == pytest.approx(1.125, abs=2 ** -16)
    assert divide(0.0, 3.0) == 0.0
    with pytest.raises(ZeroDivisionError):
        divide(1.0, 0.0)


def test_compare():
    assert compare_ge(1.125, 1.0) == 1
    assert compare_ge(0.75, 1.0) == 0
    assert compare_ge(1.0, 1.0) == 1
    assert compare_ge(np.array([0.5, 2.0]), 1.0).tolist() == [0, 1]


def test_rounding_bound_random():
    rng = np.random.default_rng(2)
    u = FMT.quantize(rng.uniform(-100, 100, 100_000))
    v = FMT.quantize(rng.uniform(-100, 100, 100_000))
    w = FMT.quantize(rng.uniform(0.5, 100, 100_000))
    tol = 2.0 ** -16
    assert np.max(np.abs(subtract(u, v) - (u - v))) <= tol
    assert np.max(np.abs(divide(u, w) - u / w)) <= tol
    lo, hi = np.minimum(u, v), np.maximum(u, v)
    x = FMT.quantize(rng.uniform(-100, 100, 100_000) / 16)
    assert np.max(np.abs(qma_rho(x / 1, lo / 16, hi / 16) - (x - lo / 16) * (x - hi / 16))) <= tol
    f = rng.uniform(0, 1, 100_000)
    assert np.max(np.abs(sine_square_scale(f, 7.0) - 7.0 * np.sin(math.pi * f) ** 2)) <= tol


def test_deterministic():
    assert divide(1.0, 3.0) == divide(1.0, 3.0)
