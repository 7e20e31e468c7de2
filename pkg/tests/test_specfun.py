import cmath
import math

from hypothesis import given, settings, strategies as st
import mpmath
import numpy as np
import pytest
from scipy.special import zeta

from painleve_connection.errors import (OutOfRangeError, PoleError,
                                        UnsupportedSectorError)
from painleve_connection.specfun import (arg_gamma, bernoulli_numbers, gamma, log_gamma,
                                         pcf_D, pcf_D_asymptotic, rgamma)

EULER_GAMMA = 0.57721566490153286061


def weierstrass_log_gamma(z, n=2000, m_max=12):
    """ln Gamma from the Weierstrass product with a Hurwitz-zeta tail."""
    total = -EULER_GAMMA * z - cmath.log(z)
    for k in range(n, 0, -1):
        total += z / k - cmath.log(1 + z / k)
    # sum_{k>n} (z/k - ln(1 + z/k)) = sum_{m>=2} (-1)^m z^m zeta(m, n+1) / m
    for m in range(2, m_max + 1):
        total += (-1) ** m * z ** m * zeta(m, n + 1) / m
    return total


def rel(a, b):
    return abs(a - b) / abs(b)


complex_pts = st.complex_numbers(min_magnitude=0.1, max_magnitude=20, allow_nan=False,
                                 allow_infinity=False)


def test_bernoulli():
    b = bernoulli_numbers(8)
    assert [str(x) for x in b[:5]] == ["1", "-1/2", "1/6", "0", "-1/30"]


def test_half_integer():
    assert abs(log_gamma(0.5) - math.log(math.sqrt(math.pi))) < 1e-14


def test_real_positive_arg():
    assert arg_gamma(2.0) == 0.0
    assert arg_gamma(7.25) == 0.0


def test_arg_near_imaginary_origin():
    assert abs(arg_gamma(1e-9j) + math.pi / 2) < 1e-8


def test_arg_negative_half():
    assert abs(arg_gamma(-0.5) + math.pi) < 1e-14
    assert rel(gamma(-0.5), -2 * math.sqrt(math.pi)) < 1e-14


def test_weierstrass_oracle_at_i_over_two():
    ref = weierstrass_log_gamma(0.5j)
    assert abs(log_gamma(0.5j) - ref) <= 1e-10
    assert abs(arg_gamma(0.5j) - ref.imag) <= 1e-10


@pytest.mark.parametrize("z", [0.5j - 0.5, 0.5 - 0.5j, 3 + 4j, 0.1 + 7j, 25 - 1j])
def test_weierstrass_oracle_grid(z):
    assert abs(log_gamma(z) - weierstrass_log_gamma(z)) <= 1e-10


@pytest.mark.parametrize("z", [3 + 4j, -2.5 + 0.3j, 0.25 - 12j, 40 + 40j, -7.3 - 0.01j])
def test_against_mpmath_loggamma(z):
    assert abs(log_gamma(z) - complex(mpmath.loggamma(z))) <= 1e-12 * max(1, abs(z))


@pytest.mark.parametrize("re", [-0.5, -1.5, -44.5, -60.0, -200.5, -1000.3])
def test_left_half_plane_branch_matches_mpmath(re):
    for y in np.concatenate([-np.geomspace(1e-8, 60, 30), np.geomspace(1e-8, 60, 30)]):
        z = complex(re, y)
        ref = complex(mpmath.loggamma(z))
        assert abs(log_gamma(z) - ref) <= 1e-13 * max(1.0, abs(ref))


def test_poles():
    for z in (0, -1, -7):
        with pytest.raises(PoleError):
            log_gamma(z)
        assert rgamma(z) == 0


@pytest.mark.parametrize("y", np.linspace(-6, 6, 25))
def test_modulus_half_line(y):
    assert rel(abs(gamma(0.5 + 1j * y)) ** 2, math.pi / math.cosh(math.pi * y)) <= 1e-12


@pytest.mark.parametrize("y", [0.25, 0.5, 1.0, 2.0, 3.5, -1.5])
def test_modulus_imaginary_axis(y):
    ref = 2 * math.pi / (y * (math.exp(y * math.pi) - math.exp(-y * math.pi)))
    assert rel(abs(gamma(1j * y)) ** 2, ref) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(complex_pts)
def test_recurrence(z):
    lhs = log_gamma(z + 1)
    rhs = log_gamma(z) + cmath.log(z)
    # equal up to a multiple of 2 pi i
    d = lhs - rhs
    assert abs(d.real) <= 1e-12 * max(1.0, abs(lhs))
    assert abs(math.remainder(d.imag, 2 * math.pi)) <= 1e-12 * max(1.0, abs(lhs))


@settings(max_examples=20, deadline=None)
@given(st.complex_numbers(max_magnitude=6, allow_nan=False, allow_infinity=False)
       .filter(lambda z: abs(z.imag) > 0.05))
def test_reflection(z):
    prod = gamma(z) * gamma(1 - z)
    assert rel(prod, math.pi / cmath.sin(math.pi * z)) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(complex_pts.filter(lambda z: abs(z.imag) > 1e-3))
def test_conjugation(z):
    assert abs(arg_gamma(z.conjugate()) + arg_gamma(z)) <= 1e-12 * max(1.0, abs(z) ** 2)


@pytest.mark.parametrize("sign", [1, -1])
def test_branch_continuous_along_vertical_line(sign):
    # the principal branch jumps by 2 pi only across the negative real axis
    ys = sign * np.linspace(1e-6, 20, 4001)
    args = np.array([arg_gamma(complex(-0.5, y)) for y in ys])
    assert np.max(np.abs(np.diff(args))) < 0.05
    assert abs(args[0] + sign * math.pi) < 1e-5


def test_d0_closed_form():
    assert rel(pcf_D(0, 1.3), math.exp(-1.3 ** 2 / 4)) <= 1e-12


def test_d1_closed_form():
    z = 0.7 - 0.2j
    assert rel(pcf_D(1, z), z * cmath.exp(-z * z / 4)) <= 1e-12


@pytest.mark.parametrize("nu", [0.5, -0.3 + 0.4j, 2.7, -1.5])
@pytest.mark.parametrize("z", [0.3, 2.0 - 1.0j, -4.0 + 0.5j, 3j, 12.0])
def test_pcf_against_mpmath(nu, z):
    ref = complex(mpmath.pcfd(nu, z))
    assert abs(pcf_D(nu, z) - ref) <= 1e-12 * max(abs(ref), 1e-300) + 1e-300


@pytest.mark.parametrize("nu", [0.5, 1.3 - 0.2j, -0.75])
def test_three_term_recurrence(nu):
    for r in np.linspace(0.2, 5.0, 7):
        for th in np.linspace(-math.pi, math.pi, 9):
            z = r * cmath.exp(1j * th)
            res = pcf_D(nu + 1, z) - z * pcf_D(nu, z) + nu * pcf_D(nu - 1, z)
            scale = max(abs(pcf_D(nu + 1, z)), abs(z * pcf_D(nu, z)), 1e-300)
            assert abs(res) / scale <= 1e-9


@pytest.mark.parametrize("nu", [0.5, -0.3 + 0.4j])
def test_weber_equation(nu):
    h = 1e-2
    for z in (0.5, 2.0 + 1.0j, -3.0 - 2.0j, 4.5j):
        f = [pcf_D(nu, z + k * h) for k in (-2, -1, 0, 1, 2)]
        d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
        pot = (nu + 0.5 - z * z / 4) * f[2]
        assert abs(d2 + pot) <= 1e-6 * max(abs(d2), abs(pot))


def test_pcf_range():
    with pytest.raises(OutOfRangeError):
        pcf_D(0.5, 60.0)


def test_asymptotic_d0_exact():
    assert rel(pcf_D_asymptotic(0, 30.0), math.exp(-225)) <= 1e-14


def test_asymptotic_leading_error_is_second_order():
    nu, z = 0.5, 20.0
    err = rel(pcf_D_asymptotic(nu, z), pcf_D(nu, z))
    # first omitted term nu (nu - 1) / (2 z^2)
    assert abs(err - abs(nu * (nu - 1)) / (2 * z * z)) < 1e-6


def test_asymptotic_with_corrections():
    assert rel(pcf_D_asymptotic(0.5, 20.0, n_terms=4), pcf_D(0.5, 20.0)) <= 1e-6


def test_asymptotic_stokes_rays():
    nu = 0.5
    z = 20 * cmath.exp(0.75j * math.pi)
    assert rel(pcf_D_asymptotic(nu, z, n_terms=6), pcf_D(nu, z)) <= 1e-6


def test_asymptotic_sector_errors():
    with pytest.raises(UnsupportedSectorError):
        pcf_D_asymptotic(0.5, 20 * cmath.exp(0.9j * math.pi))
    with pytest.raises(OutOfRangeError):
        pcf_D_asymptotic(0.5, 5.0)
