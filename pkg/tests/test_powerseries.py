from fractions import Fraction
import math

from hypothesis import given, settings, strategies as st
import numpy as np

from painleve_connection import _powerseries as ps

coef = st.floats(-2, 2, allow_nan=False)


def test_mul_matches_numpy_convolution():
    a = [1.0, 2.0, -0.5, 0.25]
    b = [0.5, -1.0, 3.0]
    assert np.allclose(ps.mul(a, b, 6), np.convolve(a, b)[:6])


def test_div_inverts_mul():
    a = [Fraction(1), Fraction(2), Fraction(-1, 3), Fraction(5)]
    b = [Fraction(2), Fraction(1, 7), Fraction(0), Fraction(-3)]
    assert ps.div(ps.mul(a, b, 4), b, 4) == a


def test_sin_cos_of_identity_series_is_exact():
    p = [Fraction(0), Fraction(1)] + [Fraction(0)] * 6
    s, c = ps.sin_cos(p)
    assert s == [0, 1, 0, Fraction(-1, 6), 0, Fraction(1, 120), 0, Fraction(-1, 5040)]
    assert c == [1, 0, Fraction(-1, 2), 0, Fraction(1, 24), 0, Fraction(-1, 720), 0]


def test_exp_series_at_offset():
    e = ps.exp([0.3, 1.0, 0.0, 0.0, 0.0])
    assert np.allclose(e, [math.exp(0.3) / math.factorial(k) for k in range(5)], rtol=1e-15)


def test_reciprocal_shift_and_horner():
    r = ps.reciprocal_shift(2.0, 30)
    assert abs(ps.horner(r, 0.1) - 1 / 2.1) < 1e-15


@settings(max_examples=50, deadline=None)
@given(st.lists(coef, min_size=2, max_size=8), st.floats(-0.5, 0.5))
def test_horner_derivative_matches_deriv(a, h):
    val, der = ps.horner_with_derivative(a, h)
    assert abs(val - np.polyval(a[::-1], h)) <= 1e-12
    assert abs(der - ps.horner(ps.deriv(a), h)) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(st.lists(coef, min_size=3, max_size=6), st.floats(-0.3, 0.3))
def test_sin_squared_plus_cos_squared(p, h):
    s, c = ps.sin_cos(p)
    one = [x + y for x, y in zip(ps.mul(s, s), ps.mul(c, c))]
    assert abs(one[0] - 1) < 1e-13
    assert max(abs(v) for v in one[1:]) < 1e-11 * max(1.0, max(abs(x) for x in p)) ** len(p)
