"""The chain from ``Phi`` to fifth and third Painleve transcendents.

Variables, for a real solution ``Phi(x)``:

* ``y = exp(-2 i Phi)`` with ``s = x/2`` solves a PV equation in ``s``;
* ``sqrt(y) := exp(-i Phi)``, ``p = (sqrt(y) + 1)/(sqrt(y) - 1)`` and
  ``w = -p`` solve PIII equations in ``t = -i s = -i x/2``;
* ``h = 1 + 2 sin^2(Phi/2)/(Phi' - 1)`` solves a PV equation in
  ``tau = t^2/2 = -x^2/8``.

Derivatives never come from finite differences.  At each point the
solution is expanded as a short Taylor series in ``dx`` (by differentiating
the ODE), every transformed quantity is built as a truncated series by
series arithmetic, and derivatives with respect to ``s``, ``t`` or ``tau``
follow from the chain rule.
"""

from dataclasses import dataclass
import csv
import math

import numpy as np

from . import _powerseries as ps
from .errors import InvalidArgumentError, OutOfRangeError, SingularTransformError
from .integrator import local_taylor
from .seriesseed import series_coefficients

JET_ORDER = 4
EXCLUDE_MARGIN = 1e-3
H_SINGULAR_TOL = 1e-8


# -- jets ---------------------------------------------------------------------

def _taylor_shift(coeffs, h, n):
    """Coefficients about ``h`` of the polynomial ``sum c_k u^k``, first ``n``."""
    out = []
    c = list(coeffs)
    for _ in range(n):
        out.append(ps.horner(c, h))
        c = ps.deriv(c)
    fact = 1
    for k in range(n):
        if k:
            fact *= k
        out[k] = out[k] / fact
    return out


def solution_jet(traj, x, order=JET_ORDER):
    """Taylor coefficients of the solution about ``x`` (``c_k = Phi^(k)/k!``).

    Uses the ODE at regular points, the origin series very close to ``x = 0``,
    and the vault expansion when ``Phi`` is within ``1e-2`` of a multiple of pi.
    """
    phi, dphi = traj.state(x)
    if abs(math.sin(phi)) >= 1e-2:
        return local_taylor(x, phi, dphi, order)
    if x < 0.1:
        ser = series_coefficients(traj.a, 16).power_series
        return _taylor_shift(ser, x, order + 1)
    v = traj._nearest_vault(x)
    if v is None:
        return local_taylor(x, phi, dphi, order)
    jet = _taylor_shift(v.taylor, x - v.x_star, order + 1)
    jet[0] += v.k * math.pi
    return jet


def sine_perturbation(eps=1e-3):
    """Jet of ``eps sin x``, for negative controls."""
    def jet(x, order):
        out = []
        fact = 1
        for k in range(order + 1):
            if k:
                fact *= k
            out.append(eps * math.sin(x + k * math.pi / 2) / fact)
        return out
    return jet


def _jet(traj, x, perturbation, order=JET_ORDER):
    c = solution_jet(traj, x, order)
    if perturbation is not None:
        c = [a + b for a, b in zip(c, perturbation(x, order))]
    return c


def _derivs(series):
    """``(f, f', f'')`` from Taylor coefficients."""
    return series[0], series[1], 2 * series[2]


# -- the transformed quantities ---------------------------------------------

def _cexp(u):
    return complex(math.cos(u.imag), math.sin(u.imag)) * math.exp(u.real)


def y_series(c):
    return ps.exp([-2j * v for v in c], exp0=_cexp)


def sqrt_y_series(c):
    return ps.exp([-1j * v for v in c], exp0=_cexp)


def p_series(c):
    r = sqrt_y_series(c)
    num = [r[0] + 1] + r[1:]
    den = [r[0] - 1] + r[1:]
    return ps.div(num, den)


def h_series(c):
    """Series of ``h = 1 + 2 sin^2(Phi/2)/(Phi' - 1) = 1 + (1 - cos Phi)/(Phi' - 1)``."""
    n = len(c) - 1
    _, co = ps.sin_cos(list(c), n)
    num = [-v for v in co]
    num[0] += 1
    den = ps.deriv(c)
    den[0] -= 1
    q = ps.div(num, den, n)
    q[0] += 1
    return q


@dataclass(frozen=True)
class TransformPoint:
    x: float
    phi: float
    dphi: float
    ddphi: float
    y: complex
    w: complex
    h: float
    tau: float
    s: float


def chain_point(traj, x):
    """All transformed quantities at ``x``.

    Raises
    ------
    SingularTransformError
        If ``|Phi' - 1| <= 1e-8`` (``h`` undefined, e.g. for ``a = 0``).
    """
    c = solution_jet(traj, x, 2)
    phi, dphi, ddphi = c[0], c[1], 2 * c[2]
    if abs(dphi - 1) <= H_SINGULAR_TOL:
        raise SingularTransformError(f"Phi' = 1 at x = {x}; h is undefined")
    return point_from_state(x, phi, dphi, ddphi)


def point_from_state(x, phi, dphi, ddphi=float("nan")):
    r = complex(math.cos(phi), -math.sin(phi))
    return TransformPoint(
        x=x, phi=phi, dphi=dphi, ddphi=ddphi,
        y=r * r,
        w=-(r + 1) / (r - 1),
        h=1 + 2 * math.sin(phi / 2) ** 2 / (dphi - 1),
        tau=-x * x / 8,
        s=x / 2,
    )


# -- defects ------------------------------------------------------------------

def _rel(lhs, terms):
    scale = max([abs(lhs)] + [abs(t) for t in terms])
    return abs(lhs - sum(terms)) / scale if scale else 0.0


def pv4_defect(x, c):
    """Relative defect of the PV equation for ``y(s)``, ``s = x/2``."""
    y, yx, yxx = _derivs(y_series(c))
    s = x / 2
    ys, yss = 2 * yx, 4 * yxx
    terms = [(1 / (2 * y) + 1 / (y - 1)) * ys * ys, -ys / s, -4j * y / s,
             8 * y * (y + 1) / (y - 1)]
    return _rel(yss, terms)


def _w_t_derivs(c, sign):
    p, px, pxx = _derivs(p_series(c))
    f, fx, fxx = sign * p, sign * px, sign * pxx
    return f, 2j * fx, -4 * fxx


def piii6_defect(x, c):
    """Relative defect of the PIII equation for ``w = -p`` in ``t = -i x/2``."""
    w, wt, wtt = _w_t_derivs(c, -1)
    t = -0.5j * x
    terms = [wt * wt / w, -wt / t, (w * w - 1) / t, w ** 3, -1 / w]
    return _rel(wtt, terms)


def piii5_defect(x, c):
    """Relative defect of the PIII equation satisfied by ``p`` itself."""
    p, pt, ptt = _w_t_derivs(c, 1)
    t = -0.5j * x
    terms = [pt * pt / p, -pt / t, -(p * p - 1) / t, p ** 3, -1 / p]
    return _rel(ptt, terms)


def _h_tau_derivs(x, c):
    h, hx, hxx = _derivs(h_series(c))
    tp = -x / 4
    h_tau = hx / tp
    h_tautau = (hxx + h_tau / 4) / (tp * tp)
    return h, h_tau, h_tautau


def pv8_defect(x, c):
    """Relative defect of the PV equation for ``h(tau)``, ``tau = -x^2/8``."""
    h, ht, htt = _h_tau_derivs(x, c)
    tau = -x * x / 8
    terms = [(1 / (2 * h) + 1 / (h - 1)) * ht * ht, -ht / tau,
             -(h - 1) ** 2 / (8 * tau * tau * h), -h / tau]
    return _rel(htt, terms)


def h_from_w(x, c):
    """``h`` from the first relation of the pair, ``(w' - w^2 - 1)/(w' - w^2 + 1)``."""
    w, wt, _ = _w_t_derivs(c, -1)
    return (wt - w * w - 1) / (wt - w * w + 1)


PAIR_FORMS = ("published", "inverse")


def pair_defect(x, c, form="published"):
    """Round trip ``w -> h -> w`` through the pair relations.

    ``h`` and ``dh/dtau`` are built from ``w`` as series, then ``w`` is
    rebuilt and compared with the input.  ``form`` selects the second
    relation:

    * ``"published"``: ``w = 2 tau h/(tau h' - h + 1)``;
    * ``"inverse"``: ``w = 2t h/(t h_t - h + 1)`` with ``h_t = t h'``, the
      exact inverse of the first relation along ``t = -ix/2``,
      ``tau = t^2/2``.

    Returns ``|w_rec - w|/max(1, |w|)``.
    """
    if form not in PAIR_FORMS:
        raise InvalidArgumentError(f"form must be one of {PAIR_FORMS}")
    p = p_series(c)
    wser = [-v for v in p]
    n = len(wser)
    wx = ps.deriv(wser)
    wt = [2j * v for v in wx]
    w2 = ps.mul(wser, wser, n - 1)
    num = [a - b for a, b in zip(wt, w2)]
    num[0] -= 1
    den = list(num)
    den[0] += 2
    hser = ps.div(num, den, n - 1)
    h, hx = hser[0], hser[1]
    t = -0.5j * x
    tau = -x * x / 8
    htau = hx / (-x / 4)
    if form == "published":
        w_rec = 2 * tau * h / (tau * htau - h + 1)
    else:
        ht = t * htau
        w_rec = 2 * t * h / (t * ht - h + 1)
    w = wser[0]
    return abs(w_rec - w) / max(1.0, abs(w))


# -- reports -------------------------------------------------------------------

@dataclass(frozen=True)
class ResidualReport:
    """Residuals on a grid; excluded points carry ``nan``.

    ``residuals`` are defects divided by the largest term of the equation
    (for ``pair7``: the round-trip error relative to ``max(1, |w|)``).
    """

    equation: str
    grid: np.ndarray
    residuals: np.ndarray

    @property
    def excluded(self):
        return np.isnan(self.residuals)

    @property
    def norm(self):
        r = self.residuals[~self.excluded]
        return float(r.max()) if r.size else float("nan")

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["x", "residual"])
            for x, r in zip(self.grid, self.residuals):
                wr.writerow([f"{x:.17g}", f"{r:.17g}"])


def _check_grid(traj, grid):
    grid = np.asarray(grid, dtype=float)
    if grid.size and (grid.min() < traj.xs[0] or grid.max() > traj.xs[-1]):
        raise OutOfRangeError("grid outside trajectory range")
    return grid


def _report(name, traj, grid, defect, excluded, perturbation, order=JET_ORDER):
    grid = _check_grid(traj, grid)
    out = np.empty(grid.size)
    for i, x in enumerate(grid):
        c = _jet(traj, float(x), perturbation, order)
        if excluded(c):
            out[i] = np.nan
            continue
        try:
            out[i] = defect(float(x), c)
        except ZeroDivisionError:
            out[i] = np.nan
    return ResidualReport(name, grid, out)


def _near_y_one(c):
    return abs(math.sin(c[0])) < EXCLUDE_MARGIN


def _near_w_zero_or_pole(c):
    # p = i cot(Phi/2): zero at Phi = pi mod 2pi, pole at 0 mod 2pi
    return abs(math.sin(c[0] / 2)) < EXCLUDE_MARGIN or abs(math.cos(c[0] / 2)) < EXCLUDE_MARGIN


def _h_degenerate(c):
    if abs(c[1] - 1) <= 1e-6:
        return True
    h = 1 + 2 * math.sin(c[0] / 2) ** 2 / (c[1] - 1)
    return abs(h) < EXCLUDE_MARGIN or abs(h - 1) < EXCLUDE_MARGIN


def residual_PV4(traj, grid, perturbation=None):
    """Defects of the PV equation for ``y(s)`` along the trajectory."""
    return _report("PV4", traj, grid, pv4_defect, _near_y_one, perturbation)


def residual_PIII6(traj, grid, perturbation=None):
    """Defects of the PIII equation for ``w(t)``."""
    return _report("PIII6", traj, grid, piii6_defect, _near_w_zero_or_pole, perturbation)


def residual_PIII5(traj, grid, perturbation=None):
    """Defects of the PIII equation for ``p(t)``."""
    return _report("PIII5", traj, grid, piii5_defect, _near_w_zero_or_pole, perturbation)


def residual_PV8(traj, grid, perturbation=None):
    """Defects of the PV equation for ``h(tau)``."""
    return _report("PV8", traj, grid, pv8_defect,
                   lambda c: _h_degenerate(c) or _near_y_one(c), perturbation)


PAIR_DEN_MARGIN = 1e-4


def _pair_denominators(x, c):
    """Scaled denominators of both pair relations (form ``"inverse"``).

    Roundoff in the round trip grows like ``u/d^2``, so points with
    ``d < PAIR_DEN_MARGIN`` are excluded.
    """
    w = [-v for v in p_series(c)]
    n = len(w)
    wt = [2j * v for v in ps.deriv(w)]
    w2 = ps.mul(w, w, n - 1)
    d1 = abs(wt[0] - w2[0] + 1) / (abs(wt[0]) + abs(w2[0]) + 1)
    num = [a - b for a, b in zip(wt, w2)]
    num[0] -= 1
    den = list(num)
    den[0] += 2
    hser = ps.div(num, den, n - 1)
    h = hser[0]
    t = -0.5j * x
    tht = t * t * hser[1] / (-x / 4)
    d2 = abs(tht - h + 1) / (abs(tht) + abs(h) + 1)
    return d1, d2


def pair_roundtrip(traj, grid, perturbation=None, form="published"):
    """Round-trip defects through the ``w <-> h`` pair; see :func:`pair_defect`."""
    if form not in PAIR_FORMS:
        raise InvalidArgumentError(f"form must be one of {PAIR_FORMS}")

    def defect(x, c):
        if min(_pair_denominators(x, c)) < PAIR_DEN_MARGIN:
            return float("nan")
        return pair_defect(x, c, form)
    return _report("pair7", traj, grid, defect,
                   lambda c: _near_w_zero_or_pole(c) or _h_degenerate(c), perturbation)


def h_consistency(traj, grid):
    """``|h_pair(w) - h_direct(Phi)|/max(1, |h_direct|)`` on the grid.

    ``h_pair`` comes from the first pair relation applied to ``w``,
    ``h_direct`` from ``Phi`` and ``Phi'``; excluded points are ``nan``.
    """
    grid = _check_grid(traj, grid)
    out = np.empty(grid.size)
    for i, x in enumerate(grid):
        c = solution_jet(traj, float(x))
        if _near_w_zero_or_pole(c) or _h_degenerate(c):
            out[i] = np.nan
            continue
        h_direct = 1 + 2 * math.sin(c[0] / 2) ** 2 / (c[1] - 1)
        out[i] = abs(h_from_w(float(x), c) - h_direct) / max(1.0, abs(h_direct))
    return out
