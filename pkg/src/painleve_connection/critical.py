"""The separatrix ``a = 1/pi``: classification, bisection and the limit.

Below ``1/pi`` the solution ends up increasing like ``x``; above it, it
decreases like ``-x``; at ``1/pi`` it rises monotonically to ``pi/2``.
Near ``Phi = pi/2`` perturbations grow like ``e^x``, so a double-precision
integration of the separatrix itself departs after ``x ~ 30``.  For the
separatrix we therefore use a Taylor-series integrator in mpmath whose
working precision covers the ``e^X`` amplification.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import math

import mpmath

from .errors import BracketingError, InvalidArgumentError
from .integrator import solve_ivp
from .seriesseed import series_coefficients

SUBCRITICAL_B = "subcritical_B"
SUPERCRITICAL_A = "supercritical_A"
UNDECIDED = "undecided"

SEPARATRIX = "1/pi"
SLOPE_THRESHOLD = 0.5
X_CAP = 3200.0
MONOTONE_TOL = 1e-8
DEPARTURE = 1.0

TAYLOR_ORDER = 80
GUARD_BITS = 64


@dataclass(frozen=True)
class RegimeClassification:
    """Label of the large-``x`` behaviour; ``witness`` is ``(Phi, Phi')`` at ``X_used``."""

    a: float
    label: str
    X_used: float
    witness: tuple


@dataclass(frozen=True)
class BisectionResult:
    """Outcome of :func:`locate_critical`.

    ``trace`` rows are ``(iter, a_lo, a_hi, label)`` where ``label`` is the
    classification of the midpoint tested at that iteration.
    """

    a_star: float
    trace: tuple
    X_used: float

    def __float__(self):
        return self.a_star


@dataclass(frozen=True)
class LimitCheck:
    """Extended-precision integration of the separatrix up to ``X``.

    ``deviation`` is ``|Phi(X) - pi/2|``; ``tail_defect`` compares it with
    the two-term expansion ``Phi = pi/2 - 1/x - 2/(3 x^3) + O(x^-5)``.
    """

    X: float
    deviation: float
    min_slope: float
    tail_defect: float
    precision_bits: int
    xs: tuple = field(repr=False, default=())
    phis: tuple = field(repr=False, default=())
    dphis: tuple = field(repr=False, default=())

    @property
    def monotone(self):
        return self.min_slope >= -MONOTONE_TOL


def _label(phi, dphi):
    if dphi > SLOPE_THRESHOLD and phi > math.pi / 2:
        return SUBCRITICAL_B
    if dphi < -SLOPE_THRESHOLD:
        return SUPERCRITICAL_A
    return UNDECIDED


# -- extended precision --------------------------------------------------------

def _mp_value(a):
    """``a`` as an mpmath number at the current working precision."""
    if isinstance(a, str):
        if a.replace(" ", "") != SEPARATRIX:
            raise InvalidArgumentError(f"unknown symbolic parameter {a!r}")
        return 1 / mpmath.pi
    if isinstance(a, Fraction):
        return mpmath.mpf(a.numerator) / a.denominator
    return mpmath.mpf(a)


def _taylor_step_coeffs(x0, p0, p1, n):
    """Taylor coefficients of the solution through ``(x0, p0, p1)``, O(n^2)."""
    p = [p0, p1]
    s = [mpmath.sin(p0)]
    c = [mpmath.cos(p0)]
    cot = [c[0] / s[0]]
    inv = [1 / x0]
    for _ in range(1, n):
        inv.append(-inv[-1] / x0)
    dp = []
    sq = []
    for k in range(n - 1):
        if k:
            ss = 0
            cc = 0
            for j in range(1, k + 1):
                ss += j * p[j] * c[k - j]
                cc += j * p[j] * s[k - j]
            s.append(ss / k)
            c.append(-cc / k)
            acc = c[k]
            for j in range(k):
                acc -= cot[j] * s[k - j]
            cot.append(acc / s[0])
        dp.append((k + 1) * p[k + 1])
        sq.append(sum(dp[j] * dp[k - j] for j in range(k + 1)) - (1 if k == 0 else 0))
        t = sum(sq[j] * cot[k - j] for j in range(k + 1))
        damp = inv[k] - sum(dp[j] * inv[k - j] for j in range(k + 1))
        p.append((t + damp) / ((k + 1) * (k + 2)))
    return p


def _poly_and_slope(p, h):
    val = 0
    der = 0
    for coef in reversed(p):
        der = der * h + val
        val = val * h + coef
    return val, der


def integrate_extended(a, X, order=TAYLOR_ORDER, guard_bits=GUARD_BITS, samples=4,
                       stop=None):
    """Taylor-series integration from the origin in extended precision.

    The working precision is ``guard_bits + X/ln 2`` bits, enough to absorb
    the ``e^x`` growth of perturbations near ``Phi = pi/2``.  Non-float
    ``a`` (a ``Fraction``, an mpmath number or the string ``"1/pi"``) is
    converted at that precision.  ``stop(x, phi, dphi)``, called with floats
    after each step, ends the integration early when it returns true.

    Returns
    -------
    xs, phis, dphis : list of float
        Step endpoints plus ``samples`` interior points per step.
    end : tuple
        ``(Phi - pi/2, Phi')`` at the last point as floats computed before
        rounding; the last point is ``xs[-1]``.
    bits : int
    """
    if X <= 0:
        raise InvalidArgumentError(f"X must be positive, got {X}")
    bits = guard_bits + int(math.ceil(X / math.log(2))) + 16
    with mpmath.workprec(bits):
        av = _mp_value(a)
        eps = mpmath.mpf(2) ** (-bits)
        ser = series_coefficients(av, order).power_series
        # seed where the origin series tail is below eps
        x = min(mpmath.mpf("0.05"), (eps / abs(ser[-1])) ** (mpmath.mpf(1) / order) / 2)
        phi, dphi = _poly_and_slope(ser, x)
        Xm = mpmath.mpf(X)
        xs, phis, dphis = [float(x)], [float(phi)], [float(dphi)]
        while x < Xm:
            p = _taylor_step_coeffs(x, phi, dphi, order)
            h = min((eps / abs(p[k])) ** (mpmath.mpf(1) / k)
                    for k in (order - 1, order) if p[k] != 0) / 2
            h = min(h, x / 2, Xm - x)
            for i in range(1, samples + 1):
                v, d = _poly_and_slope(p, h * i / (samples + 1))
                xs.append(float(x + h * i / (samples + 1)))
                phis.append(float(v))
                dphis.append(float(d))
            phi, dphi = _poly_and_slope(p, h)
            x += h
            xs.append(float(x))
            phis.append(float(phi))
            dphis.append(float(dphi))
            if stop is not None and stop(xs[-1], phis[-1], dphis[-1]):
                break
        end = (float(phi - mpmath.pi / 2), float(dphi))
    return xs, phis, dphis, end, bits


def limit_check(X=200.0, a=SEPARATRIX, order=TAYLOR_ORDER):
    """``|Phi(X) - pi/2|`` on the separatrix, with a monotonicity witness.

    ``min_slope`` is the smallest ``Phi'`` sampled on ``[1, X]``.
    """
    if X < 100:
        raise InvalidArgumentError(f"limit_check needs X >= 100, got {X}")
    xs, phis, dphis, (eta, _), bits = integrate_extended(a, X, order)
    slopes = [d for x, d in zip(xs, dphis) if x >= 1]
    tail = abs(eta + 1 / X + 2 / (3 * X ** 3))
    return LimitCheck(X=float(X), deviation=abs(eta), min_slope=min(slopes),
                      tail_defect=tail, precision_bits=bits, xs=tuple(xs),
                      phis=tuple(phis), dphis=tuple(dphis))


# -- classification and bisection ----------------------------------------------

def _departed(x, phi, dphi):
    # a solution starts below pi/2 rising, so only a falling state counts below
    if phi > math.pi / 2 + DEPARTURE:
        return dphi > SLOPE_THRESHOLD
    return phi < math.pi / 2 - DEPARTURE and dphi < -SLOPE_THRESHOLD

def classify(a, X=100.0, tol=1e-10, X_cap=None):
    """Label the large-``x`` behaviour of the solution with parameter ``a``.

    ``subcritical_B`` if ``Phi'(X) > 0.5`` and ``Phi(X) > pi/2``,
    ``supercritical_A`` if ``Phi'(X) < -0.5``, ``undecided`` otherwise.
    An undecided result is retried with ``X`` doubled up to ``X_cap``.

    Float ``a`` is integrated in double precision (default cap 3200).  A
    ``Fraction``, an mpmath number or ``"1/pi"`` selects the
    extended-precision integrator, whose cost grows quickly with ``X``;
    there the cap defaults to ``X`` (no escalation), and the integration
    stops once ``Phi`` is above ``pi/2 + 1`` and rising or below
    ``pi/2 - 1`` and falling: B-type solutions rise above ``pi/2`` and
    A-type ones never reach it, so the side of departure decides the label
    and ``X_used`` is the departure point.
    """
    if X < 50:
        raise InvalidArgumentError(f"classify needs X >= 50, got {X}")
    extended = not isinstance(a, (float, int)) or isinstance(a, bool)
    if X_cap is None:
        X_cap = X if extended else X_CAP
    X_cur = float(X)
    while True:
        if extended:
            xs, _, _, (eta, dphi), _ = integrate_extended(a, X_cur, stop=_departed)
            phi = math.pi / 2 + eta
            X_cur = min(X_cur, xs[-1])
        else:
            phi, dphi = solve_ivp(float(a), X_cur, tol).state(X_cur)
        label = _label(phi, dphi)
        if label != UNDECIDED or 2 * X_cur > X_cap:
            a_out = float(_mp_value(a)) if extended else float(a)
            return RegimeClassification(a=a_out, label=label, X_used=X_cur,
                                        witness=(float(phi), float(dphi)))
        X_cur *= 2


def locate_critical(a_lo=0.1, a_hi=1.0, X=200.0, bisection_tol=1e-6, tol=1e-10):
    """Bisect for the separatrix parameter between a B-type and an A-type ``a``.

    Raises
    ------
    BracketingError
        ``a_lo`` is not subcritical or ``a_hi`` is not supercritical.
    """
    if not a_lo < a_hi:
        raise InvalidArgumentError("need a_lo < a_hi")
    lo = classify(a_lo, X, tol)
    hi = classify(a_hi, X, tol)
    if lo.label != SUBCRITICAL_B or hi.label != SUPERCRITICAL_A:
        raise BracketingError(
            f"bracket [{a_lo}, {a_hi}] classified as ({lo.label}, {hi.label})")
    trace = []
    X_used = max(lo.X_used, hi.X_used)
    it = 0
    while a_hi - a_lo > bisection_tol:
        mid = 0.5 * (a_lo + a_hi)
        res = classify(mid, X, tol)
        X_used = max(X_used, res.X_used)
        trace.append((it, a_lo, a_hi, res.label))
        it += 1
        if res.label == SUBCRITICAL_B:
            a_lo = mid
        elif res.label == SUPERCRITICAL_A:
            a_hi = mid
        else:
            # tracks the separatrix up to the cap: resolution exhausted
            a_lo = a_hi = mid
    return BisectionResult(a_star=0.5 * (a_lo + a_hi), trace=tuple(trace), X_used=X_used)
