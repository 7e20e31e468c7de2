"""Power-series solution at the origin.

Near ``x = 0`` the regular solution is ``Phi = x - a x**2 + c_3 x**3 + ...``.
Only ``a`` is free: substituting the series into

    Phi'' = (Phi'**2 - 1) cot(Phi) + (1 - Phi') / x

the coefficient of ``x**(n-2)`` depends on ``c_n`` through the factor
``n (n - 2)``, which vanishes only for ``n = 2``.  The remaining coefficients
follow one at a time from that linear relation.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

import mpmath
import numpy as np

from . import _powerseries as ps
from .errors import InvalidArgumentError, OutOfRangeError

DEFAULT_ORDER = 12
DEFAULT_SEED_X = 1e-2
RADIUS_RATIO = 1e-14


@dataclass(frozen=True)
class SeriesExpansion:
    """Truncated expansion ``Phi(x) = sum_{k=1}^{N} c_k x**k``.

    ``coeffs[k-1]`` holds ``c_k``.  ``radius_hint`` is the largest ``x`` at
    which the final retained terms stay below ``1e-14`` of the leading term.
    """

    a: object
    coeffs: tuple
    order: int
    radius_hint: float

    @property
    def power_series(self):
        """Coefficient list including the vanishing constant term."""
        return [self.coeffs[0] * 0] + list(self.coeffs)


def equation_defect_coefficients(phi, n_terms):
    """Coefficients of ``Phi'' - (Phi'^2 - 1) cot Phi - (1 - Phi')/x``.

    ``phi`` is a coefficient list with ``phi[0] = 0`` and ``phi[1] = 1``.
    The result has ``n_terms`` entries, valid when ``len(phi) >= n_terms + 2``.
    """
    m = n_terms
    p = list(phi[: m + 2])
    while len(p) < m + 2:
        p.append(p[0] * 0)
    dphi = ps.deriv(p)
    ddphi = ps.deriv(dphi)
    sq = ps.mul(dphi, dphi, m + 1)
    sq[0] = sq[0] - 1
    s, c = ps.sin_cos(p, m + 2)
    cot_reg = ps.div(c, ps.shift_down(s), m)
    t = ps.mul(ps.shift_down(sq), cot_reg, m)
    return [ddphi[k] - t[k] + dphi[k + 1] for k in range(m)]


def series_coefficients(a, N=DEFAULT_ORDER):
    """Origin expansion of the solution with ``Phi = x - a x**2 + O(x**3)``.

    Parameters
    ----------
    a : float, Fraction or mpmath number
        Boundary parameter.  The coefficients inherit its scalar type, so a
        ``Fraction`` yields the exact rational expansion.
    N : int
        Highest retained power, at least 3.
    """
    if N < 3:
        raise InvalidArgumentError(f"series order must be >= 3, got {N}")
    zero = a * 0
    phi = [zero, zero + 1, -a]
    for n in range(3, N + 1):
        phi.append(zero)
        defect = equation_defect_coefficients(phi, n - 1)[n - 2]
        phi[n] = -defect / (n * (n - 2))
    coeffs = tuple(phi[1:])
    return SeriesExpansion(a=a, coeffs=coeffs, order=N,
                           radius_hint=_radius_hint(coeffs))


def _radius_hint(coeffs):
    nonzero = [(k + 1, abs(float(c))) for k, c in enumerate(coeffs)
               if k >= 1 and c != 0]
    if not nonzero:
        return math.inf
    k, mag = nonzero[-1]
    return (RADIUS_RATIO / mag) ** (1.0 / (k - 1))


def eval_seed(series, x0=DEFAULT_SEED_X, check_radius=True):
    """Value, derivative and tail bound of the series at ``x0``.

    Returns
    -------
    (phi, dphi, tail) : tuple of float
        ``tail`` is the magnitude of the last retained term.

    ``check_radius=False`` skips the trust-radius guard; the tail bound is
    still reported.
    """
    if x0 <= 0 or (check_radius and x0 > series.radius_hint):
        raise OutOfRangeError(
            f"seed point {x0} outside trust radius (0, {series.radius_hint:.6g}]")
    coeffs = [float(c) for c in series.power_series]
    value, slope = ps.horner_with_derivative(coeffs, x0)
    tail = abs(coeffs[-1]) * x0 ** series.order
    return value, slope, tail


def _mp(c):
    if isinstance(c, Fraction):
        return mpmath.mpf(c.numerator) / c.denominator
    return mpmath.mpf(c)


def series_residual(series, x, prec=320):
    """ODE residual of the truncated series at ``x``, in extended precision.

    The residual of an order-``N`` expansion is ``O(x**(N-1))``, far below
    double-precision roundoff near the origin, so it is evaluated with
    ``prec`` bits.  Build the series from a ``Fraction`` to keep the
    coefficients exact; rounded float coefficients leave a residual floor.
    """
    with mpmath.workprec(prec):
        c = [_mp(ck) for ck in series.coeffs]
        xm = _mp(Fraction(x) if isinstance(x, float) else x)
        phi = mpmath.polyval(c[::-1] + [0], xm)
        dphi = mpmath.polyval([(k + 1) * ck for k, ck in enumerate(c)][::-1], xm)
        ddphi = mpmath.polyval([(k + 1) * k * ck for k, ck in enumerate(c)][:0:-1], xm)
        r = ddphi - (dphi * dphi - 1) * mpmath.cot(phi) - (1 - dphi) / xm
        return float(r)


def residual_slope(a, N, x_lo=1e-3, x_hi=1e-2, n=9):
    """Leading power of the truncation residual on ``[x_lo, x_hi]``.

    Fits ``ln|r| = s ln x + b + d x`` on a geometric grid, the ``x`` column
    absorbing the next-order term so that ``s`` estimates the leading
    exponent.  Returns ``inf`` when the residual vanishes identically.
    """
    series = series_coefficients(Fraction(a), N)
    xs = np.geomspace(x_lo, x_hi, n)
    r = np.array([abs(series_residual(series, float(x))) for x in xs])
    if not np.all(r > 0):
        return math.inf
    A = np.column_stack([np.log(xs), np.ones_like(xs), xs])
    return float(np.linalg.lstsq(A, np.log(r), rcond=None)[0][0])
