"""Complex log-gamma and parabolic cylinder functions.

``log_gamma`` works in double precision: Stirling's series after an upward
shift to ``Re z >= 15``, and for ``Re z < 1/2`` the reflection formula with
a logarithm of ``sin(pi z)`` that is analytic on the upper half-plane.  The result is the principal branch, i.e. the
one continuous on the plane cut along the negative real axis and real for
``z > 0``.

``pcf_D`` sums the even and odd Kummer series of Weber's equation.  On the
recessive side the two sums cancel to roughly ``exp(-|z|^2/2)`` of their
size, so the summation and the two gamma factors run in extended precision
through mpmath, with the working precision raised by the expected loss.
"""

import cmath
from fractions import Fraction
from functools import lru_cache
import math

import mpmath

from .errors import (OutOfRangeError, OverflowEvaluationError, PoleError,
                     UnsupportedSectorError)

_LN_SQRT_2PI = 0.5 * math.log(2 * math.pi)
_LOG_PI = math.log(math.pi)
_LN2 = math.log(2.0)
_SHIFT = 15.0
_N_STIRLING = 10


@lru_cache(maxsize=None)
def bernoulli_numbers(n):
    """``B_0 .. B_n`` as Fractions (``B_1 = -1/2`` convention)."""
    b = [Fraction(0)] * (n + 1)
    a = [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        b[m] = a[0]
    if n >= 1:
        b[1] = -b[1]
    return tuple(b)


def _stirling_coeffs(k):
    bn = bernoulli_numbers(2 * k)
    return [bn[2 * j] / (2 * j * (2 * j - 1)) for j in range(1, k + 1)]


_STIRLING = [float(c) for c in _stirling_coeffs(_N_STIRLING)]


def _is_pole(z):
    return z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real)


def _log_sin_pi_upper(z):
    """A logarithm of ``sin(pi z)`` analytic on ``Im z >= 0``.

    ``sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z})`` and the last factor
    has positive real part there, so its principal log is continuous.  The
    integer part of ``z`` is removed exactly before scaling by ``pi``.
    """
    n = round(z.real)
    w = z - n
    one_minus = -2j * cmath.exp(1j * math.pi * w) * cmath.sin(math.pi * w)
    return complex(-_LN2, math.pi / 2) - 1j * math.pi * w - 1j * math.pi * n + cmath.log(one_minus)


def _log_gamma_right(z):
    """Principal ln Gamma for ``Re z >= 1/2``."""
    shift = 0j
    while z.real < _SHIFT:
        shift += cmath.log(z)
        z += 1
    w = 1 / z
    w2 = w * w
    series = 0j
    for c in reversed(_STIRLING):
        series = series * w2 + c
    return (z - 0.5) * cmath.log(z) - z + _LN_SQRT_2PI + series * w - shift


def log_gamma(z):
    """Principal branch of ``ln Gamma(z)``.

    Parameters
    ----------
    z : complex or float

    Returns
    -------
    complex

    Raises
    ------
    PoleError
        If ``z`` is zero or a negative integer.
    """
    z = complex(z)
    if _is_pole(z):
        raise PoleError(f"Gamma has a pole at z = {z.real:g}")
    if z.real >= 0.5:
        return _log_gamma_right(z)
    if z.imag < 0:
        return log_gamma(z.conjugate()).conjugate()
    # reflection; both sides are analytic on Im z >= 0 and agree at z = 1/2
    return _LOG_PI - _log_sin_pi_upper(z) - _log_gamma_right(1 - z)


def arg_gamma(z):
    """``Im ln Gamma(z)`` on the principal (continuous) branch.

    This is a continuous argument, not reduced to ``(-pi, pi]``; for example
    ``arg_gamma(-0.5) = -pi`` while ``arg_gamma(iy) -> -pi/2`` as ``y -> 0+``.
    """
    return log_gamma(z).imag


def gamma(z):
    """``Gamma(z)`` for complex ``z``."""
    return cmath.exp(log_gamma(z))


def rgamma(z):
    """``1/Gamma(z)``, zero at the poles of Gamma."""
    z = complex(z)
    if _is_pole(z):
        return 0j
    return cmath.exp(-log_gamma(z))


# -- extended precision -------------------------------------------------------

def _kummer_m(a, b, x, eps):
    """Kummer ``M(a, b, x)`` by direct summation."""
    term = x.__class__(1)
    total = term
    k = 0
    big = abs(term)
    while True:
        term = term * (a + k) / (b + k) * x / (k + 1)
        total += term
        k += 1
        mag = abs(term)
        if mag > big:
            big = mag
        if k > abs(x) and mag <= eps * big:
            return total
        if k > 100000:
            raise OverflowEvaluationError("Kummer series failed to converge")


PCF_MAX_ABS_Z = 50.0


def pcf_D(nu, z):
    """Parabolic cylinder function ``D_nu(z)``.

    Uses ``D_nu(z) = D_nu(0) y_even(z) + D_nu'(0) y_odd(z)`` with

    ``y_even = exp(-z^2/4) M(-nu/2, 1/2, z^2/2)``,
    ``y_odd = z exp(-z^2/4) M((1-nu)/2, 3/2, z^2/2)``,

    ``D_nu(0) = sqrt(pi) 2^(nu/2) / Gamma((1-nu)/2)`` and
    ``D_nu'(0) = -sqrt(pi) 2^((nu+1)/2) / Gamma(-nu/2)``.

    Parameters
    ----------
    nu, z : complex
        Order and argument, ``|z| <= 50``.

    Raises
    ------
    OutOfRangeError
        ``|z| > 50``.
    OverflowEvaluationError
        The value does not fit in a double.
    """
    nu = complex(nu)
    z = complex(z)
    if abs(z) > PCF_MAX_ABS_Z:
        raise OutOfRangeError(f"|z| = {abs(z):g} exceeds {PCF_MAX_ABS_Z:g}")
    # bits lost: series terms reach ~exp(|z|^2/2 + |Re z^2|/4) times the result
    lost = (abs(z) ** 2 / 2 + abs((z * z).real) / 4 + abs(nu) * math.log1p(abs(z))) / math.log(2)
    prec = 80 + int(lost) + int(2 * math.log2(1 + abs(nu)))
    with mpmath.workprec(prec):
        mp = mpmath.mp
        nu_m = mp.mpc(nu)
        z_m = mp.mpc(z)
        x = z_m * z_m / 2
        eps = mp.mpf(2) ** (-prec)
        sqpi = mpmath.sqrt(mp.pi)
        d0 = sqpi * mpmath.power(2, nu_m / 2) * mpmath.rgamma((1 - nu_m) / 2)
        d1 = -sqpi * mpmath.power(2, (nu_m + 1) / 2) * mpmath.rgamma(-nu_m / 2)
        total = mp.mpc(0)
        if d0 != 0:
            total += d0 * _kummer_m(-nu_m / 2, mp.mpf(0.5), x, eps)
        if d1 != 0:
            total += d1 * z_m * _kummer_m((1 - nu_m) / 2, mp.mpf(1.5), x, eps)
        val = total * mpmath.exp(-z_m * z_m / 4)
        try:
            out = complex(val)
        except OverflowError:
            out = complex(math.inf, 0)
    if not (math.isfinite(out.real) and math.isfinite(out.imag)):
        raise OverflowEvaluationError(f"D_nu(z) overflows double precision at z = {z}")
    return out


def _asymptotic_sum(coef, n_terms, inv2z2):
    """``sum_s coef(s) (1/(2 z^2))^s / s!`` for ``s < n_terms``."""
    total = 0j
    term = 1 + 0j
    for s in range(n_terms):
        if s:
            term = term * coef(s) * inv2z2 / s
        total += term
    return total


def pcf_D_asymptotic(nu, z, arg_z=None, n_terms=1, sector_tol=1e-12):
    """Large-``|z|`` asymptotics of ``D_nu(z)``.

    Three cases, selected by ``arg z``:

    * ``-3pi/4 < arg z < 3pi/4``:  ``z^nu e^{-z^2/4}``
    * ``arg z = 3pi/4``:  the above minus
      ``sqrt(2 pi)/Gamma(-nu) e^{i pi nu} z^{-nu-1} e^{z^2/4}``
    * ``arg z = 5pi/4``:  ``e^{-2 pi i nu} z^nu e^{-z^2/4}`` minus the same
      subdominant term.

    Parameters
    ----------
    nu, z : complex
    arg_z : float, optional
        Argument to use for ``z``; needed for ``5pi/4``, which the principal
        argument cannot express.  Defaults to ``cmath.phase(z)``.
    n_terms : int
        Terms of each asymptotic series; ``1`` is the leading order.
    """
    nu = complex(nu)
    z = complex(z)
    r = abs(z)
    if r < 15:
        raise OutOfRangeError(f"asymptotic form needs |z| >= 15, got {r:g}")
    th = cmath.phase(z) if arg_z is None else float(arg_z)
    if abs(th - 0.75 * math.pi) <= sector_tol:
        branch = 2
    elif abs(th - 1.25 * math.pi) <= sector_tol:
        branch = 3
    elif -0.75 * math.pi < th < 0.75 * math.pi:
        branch = 1
    else:
        raise UnsupportedSectorError(f"arg z = {th:.6g} outside the covered sectors")
    log_z = complex(math.log(r), th)
    zz = r * r * cmath.exp(2j * th)
    inv = 1 / (2 * zz)
    # (-1)^s (-nu)_{2s} and (nu+1)_{2s} recurrences
    main = _asymptotic_sum(lambda s: -(nu - 2 * s + 2) * (nu - 2 * s + 1), n_terms, inv)
    value = cmath.exp(nu * log_z - zz / 4) * main
    if branch == 3:
        value *= cmath.exp(-2j * math.pi * nu)
    if branch > 1:
        sub = _asymptotic_sum(lambda s: (nu + 2 * s - 1) * (nu + 2 * s), n_terms, inv)
        sub_coef = math.sqrt(2 * math.pi) * rgamma(-nu) * cmath.exp(1j * math.pi * nu)
        value -= sub_coef * cmath.exp((-nu - 1) * log_z + zz / 4) * sub
    return value
