from fractions import Fraction
import math

from hypothesis import given, settings, strategies as st
import pytest

from painleve_connection.errors import InvalidArgumentError, OutOfRangeError
from painleve_connection.seriesseed import (eval_seed, residual_slope, series_coefficients,
                                            series_residual)


def test_a_zero_is_identity():
    s = series_coefficients(0.0, 8)
    assert s.coeffs[0] == 1
    assert all(c == 0 for c in s.coeffs[1:])


@pytest.mark.parametrize("a", [0.2, -1.3, 0.0, 1 / math.pi, 5.0])
def test_leading_coefficients(a):
    s = series_coefficients(a, 6)
    assert s.coeffs[0] == 1
    assert s.coeffs[1] == -a
    assert s.coeffs[2] == 0


def test_exact_rational_coefficients():
    s = series_coefficients(Fraction(1, 5), 10)
    assert all(isinstance(c, Fraction) for c in s.coeffs)
    f = series_coefficients(0.2, 10)
    for q, c in zip(s.coeffs, f.coeffs):
        assert abs(float(q) - c) <= 1e-15 * max(1.0, abs(c))


def test_exact_series_has_zero_defect_through_order():
    s = series_coefficients(Fraction(3, 7), 9)
    r = series_residual(s, 1e-3)
    assert abs(r) < 2 * (1e-3) ** 8 * 1e3


def test_order_below_three_rejected():
    with pytest.raises(InvalidArgumentError):
        series_coefficients(0.2, 2)


def test_seed_a_zero():
    assert eval_seed(series_coefficients(0.0, 12), 0.01)[:2] == (0.01, 1.0)


def test_seed_a_02_first_terms():
    phi, dphi, tail = eval_seed(series_coefficients(0.2, 8), 0.01)
    assert abs(phi - (0.01 - 0.2e-4)) < 1e-7
    assert abs(dphi - (1 - 0.4e-2)) < 1e-4
    assert tail < 1e-14


def test_seed_order_doubling():
    lo = eval_seed(series_coefficients(1.0, 10), 0.05, check_radius=False)
    hi = eval_seed(series_coefficients(1.0, 16), 0.05, check_radius=False)
    assert abs(lo[0] - hi[0]) <= 1e-12
    assert abs(lo[1] - hi[1]) <= 1e-10


def test_seed_outside_radius():
    s = series_coefficients(1.0, 10)
    with pytest.raises(OutOfRangeError, match="radius"):
        eval_seed(s, 10 * s.radius_hint)
    with pytest.raises(OutOfRangeError):
        eval_seed(s, -0.01)


@pytest.mark.parametrize("N", [8, 10, 12])
@pytest.mark.parametrize("a", [0.2, 1.0, -0.7])
def test_residual_slope(a, N):
    assert residual_slope(a, N) >= N - 1 - 1e-3


def test_residual_slope_exact_solution():
    assert residual_slope(0.0, 8) == math.inf


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 3.0))
def test_parity(a):
    plus = series_coefficients(a, 10).coeffs
    minus = series_coefficients(-a, 10).coeffs
    assert minus[1] == -plus[1]
    # Phi(x; -a) = -Phi(-x; a): c_k(-a) = (-1)^(k+1) c_k(a)
    for k, (p, m) in enumerate(zip(plus, minus), start=1):
        assert abs(m - (-1) ** (k + 1) * p) <= 1e-12 * max(1.0, abs(p))
