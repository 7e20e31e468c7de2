"""Adaptive integration of Phi'' = (Phi'^2 - 1) cot Phi + (1 - Phi')/x.

The right-hand side is singular on the lines ``Phi = k pi`` although the
solutions are smooth there: every solution crosses such a line with
``Phi' = +1`` or ``-1``.  Writing ``psi = Phi - k pi`` and ``h = x - x*``,
power matching gives

    psi = eps h - (1 - eps)/(2 x*) h**2 + b3 h**3 + b4 h**4 + ...

where the cubic coefficient ``b3`` is free and everything above it follows
from ``(x*, eps, b3)``.  Away from the lines we take Dormand-Prince 5(4)
steps; once the solution is within ``delta_sing`` of a line we fit
``(x*, b3)`` to the incoming state and jump symmetrically across with the
local series.
"""

from bisect import bisect_right
from dataclasses import dataclass, field
import csv
import math

import numpy as np

from . import _powerseries as ps
from .errors import (BlowUpError, InconsistentCrossingError, IntegrationError,
                     InvalidArgumentError, OutOfRangeError)
from .seriesseed import DEFAULT_ORDER, DEFAULT_SEED_X, eval_seed, series_coefficients

PI = math.pi
DELTA_SING = 0.05
VAULT_ORDER = 16
# coarse slope gate before the crossing fit; the fit itself is the real check
SLOPE_GATE = 0.5
MAX_DPHI = 1e3

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = _A[6]
# fifth-order minus embedded fourth-order weights
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
# Shampine's continuous extension: y(x + t h) = y + h sum_i K_i sum_m P[i][m] t^(m+1)
_P = (
    (1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799),
    (0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072),
    (0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632),
    (0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844),
    (0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423),
)


def rhs(x, phi, dphi):
    """Second derivative from the ODE, in the factored form."""
    return (dphi - 1.0) * (dphi + 1.0) * math.cos(phi) / math.sin(phi) + (1.0 - dphi) / x


# -- local series -----------------------------------------------------------

def _defect_coefficients(psi, inv_x, n_terms):
    """Coefficients of the ODE defect for a series ``psi`` vanishing at h=0.

    ``inv_x`` is the series of ``1/x`` about the expansion point.
    """
    m = n_terms
    p = list(psi[: m + 2]) + [0.0] * max(0, m + 2 - len(psi))
    dpsi = ps.deriv(p)
    ddpsi = ps.deriv(dpsi)
    sq = ps.mul(dpsi, dpsi, m + 1)
    sq[0] -= 1.0
    s, c = ps.sin_cos(p, m + 2)
    cot_reg = ps.div(c, ps.shift_down(s), m)
    t = ps.mul(ps.shift_down(sq), cot_reg, m)
    one_minus = [-d for d in dpsi[:m]]
    one_minus[0] += 1.0
    damp = ps.mul(one_minus, inv_x, m)
    return [ddpsi[k] - t[k] - damp[k] for k in range(m)]


def crossing_series(x_star, eps, b3, order=VAULT_ORDER):
    """Taylor coefficients of ``psi = Phi - k pi`` about a crossing.

    Parameters
    ----------
    x_star : float
        Crossing abscissa (> 0).
    eps : {+1, -1}
        Slope ``Phi'(x*)``.
    b3 : float
        The free cubic coefficient.
    order : int
        Highest power retained (>= 3).
    """
    inv_x = ps.reciprocal_shift(x_star, order + 1)
    b = [0.0, float(eps), 0.0, 0.0]
    b[2] = -_defect_coefficients(b, inv_x, 1)[0] / (2 * (2 - 3))
    b[3] = b3
    for n in range(4, order + 1):
        b.append(0.0)
        d = _defect_coefficients(b, inv_x, n - 1)[n - 2]
        b[n] = -d / (n * (n - 3))
    return b


@dataclass(frozen=True)
class VaultExpansion:
    """Local series used to step across ``Phi = k pi``.

    ``taylor[j]`` is the coefficient of ``(x - x_star)**j`` in ``Phi - k pi``;
    the expansion is used on ``[x_in, x_out]``.
    """

    x_star: float
    k: int
    eps: int
    taylor: tuple
    x_in: float
    x_out: float

    def evaluate(self, x):
        h = x - self.x_star
        t = self.taylor
        val, der = ps.horner_with_derivative(t, h)
        dd = ps.horner(ps.deriv(ps.deriv(t)), h)
        return self.k * PI + val, der, dd


def vault(x, phi, dphi, order=VAULT_ORDER):
    """Fit the crossing ``(x*, b3)`` to a state just before ``Phi = k pi``.

    Raises
    ------
    InconsistentCrossingError
        If the slope is not within 1e-2 of +-1, or the fit does not converge.
    """
    eps = 1 if dphi > 0 else -1
    if abs(dphi - eps) > SLOPE_GATE:
        raise InconsistentCrossingError(
            f"slope {dphi:.6g} near Phi = k pi at x = {x:.6g} is not +-1", last_x=x)
    k = int(round(phi / PI))
    psi_in = phi - k * PI
    x_star = x - psi_in * eps
    hh = x - x_star
    b2 = -(1 - eps) / (2 * x_star)
    b3 = (dphi - eps - 2 * b2 * hh) / (3 * hh * hh) if hh != 0 else 0.0

    def resid(xs_, b3_):
        t = crossing_series(xs_, eps, b3_, order)
        v, d = ps.horner_with_derivative(t, x - xs_)
        return v - psi_in, d - dphi

    for _ in range(30):
        r1, r2 = resid(x_star, b3)
        dx = 1e-7 * max(abs(hh), 1e-12)
        db = 1e-6 * max(abs(b3), 1.0)
        f1x, f2x = resid(x_star + dx, b3)
        f1b, f2b = resid(x_star, b3 + db)
        j11, j21 = (f1x - r1) / dx, (f2x - r2) / dx
        j12, j22 = (f1b - r1) / db, (f2b - r2) / db
        det = j11 * j22 - j12 * j21
        if det == 0:
            break
        step_x = (r1 * j22 - r2 * j12) / det
        step_b = (j11 * r2 - j21 * r1) / det
        x_star -= step_x
        b3 -= step_b
        hh = x - x_star
        if abs(step_x) <= 1e-15 * max(1.0, abs(x_star)) and abs(step_b) <= 1e-13 * max(1.0, abs(b3)):
            break
    r1, r2 = resid(x_star, b3)
    if abs(r1) > 1e-12 * max(1.0, abs(phi)) or abs(r2) > 1e-11:
        raise InconsistentCrossingError(
            f"crossing fit did not converge near x = {x:.6g}", last_x=x)
    taylor = tuple(crossing_series(x_star, eps, b3, order))
    return VaultExpansion(x_star=x_star, k=k, eps=eps, taylor=taylor,
                          x_in=x, x_out=2 * x_star - x)


# -- trajectory --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SolutionTrajectory:
    """Dense numerical solution for one boundary parameter ``a``.

    Interval ``i`` (between ``xs[i]`` and ``xs[i+1]``) is either a Runge-Kutta
    step, with interpolation coefficients ``dense[i]``, or a vault, in which
    case ``segment[i]`` is the index into ``vaults``.
    """

    a: float
    xs: np.ndarray
    phis: np.ndarray
    dphis: np.ndarray
    vaults: tuple
    tol: float
    seed_x0: float
    dense: np.ndarray = field(repr=False)
    segment: np.ndarray = field(repr=False)
    delta_sing: float = DELTA_SING
    n_rejected: int = 0

    @property
    def x_max(self):
        return float(self.xs[-1])

    @property
    def crossings(self):
        """``(x*, k, eps)`` for every vault, in order."""
        return [(v.x_star, v.k, v.eps) for v in self.vaults]

    def _nearest_vault(self, x):
        if not self.vaults:
            return None
        stars = [v.x_star for v in self.vaults]
        j = bisect_right(stars, x)
        cands = [i for i in (j - 1, j) if 0 <= i < len(stars)]
        return self.vaults[min(cands, key=lambda i: abs(stars[i] - x))]

    def _locate(self, x):
        if not self.xs[0] <= x <= self.xs[-1]:
            raise OutOfRangeError(
                f"x = {x} outside trajectory range [{self.xs[0]}, {self.xs[-1]}]")
        i = int(np.searchsorted(self.xs, x, side="right")) - 1
        return min(i, len(self.xs) - 2)

    def _interval_state(self, i, x):
        """Interpolated (phi, dphi, dphi') on interval ``i``."""
        if self.segment[i] >= 0:
            v = self.vaults[self.segment[i]]
            return v.evaluate(x)
        h = self.xs[i + 1] - self.xs[i]
        t = (x - self.xs[i]) / h
        q = self.dense[i]
        phi = self.phis[i] + h * t * (q[0, 0] + t * (q[0, 1] + t * (q[0, 2] + t * q[0, 3])))
        dphi = self.dphis[i] + h * t * (q[1, 0] + t * (q[1, 1] + t * (q[1, 2] + t * q[1, 3])))
        slope = q[1, 0] + t * (2 * q[1, 1] + t * (3 * q[1, 2] + t * 4 * q[1, 3]))
        return float(phi), float(dphi), float(slope)

    def state(self, x):
        """Interpolated ``(Phi, Phi')`` at ``x``."""
        i = self._locate(x)
        if x == self.xs[i]:
            return float(self.phis[i]), float(self.dphis[i])
        if x == self.xs[i + 1]:
            return float(self.phis[i + 1]), float(self.dphis[i + 1])
        phi, dphi, _ = self._interval_state(i, x)
        return phi, dphi

    def sample(self, x):
        """Vectorised ``(Phi, Phi')`` at an array of abscissae."""
        x = np.asarray(x, dtype=float)
        if x.size and (x.min() < self.xs[0] or x.max() > self.xs[-1]):
            raise OutOfRangeError("sample points outside trajectory range")
        idx = np.clip(np.searchsorted(self.xs, x, side="right") - 1, 0, len(self.xs) - 2)
        h = self.xs[idx + 1] - self.xs[idx]
        t = (x - self.xs[idx]) / h
        q = self.dense[idx]
        phi = self.phis[idx] + h * t * (q[:, 0, 0] + t * (q[:, 0, 1] + t * (q[:, 0, 2] + t * q[:, 0, 3])))
        dphi = self.dphis[idx] + h * t * (q[:, 1, 0] + t * (q[:, 1, 1] + t * (q[:, 1, 2] + t * q[:, 1, 3])))
        for j in np.nonzero(self.segment[idx] >= 0)[0]:
            v = self.vaults[self.segment[idx[j]]]
            phi[j], dphi[j], _ = v.evaluate(float(x[j]))
        return phi, dphi

    def interpolant_slope(self, x):
        """Derivative of the ``Phi'`` interpolant (not the ODE right-hand side)."""
        i = self._locate(x)
        return self._interval_state(i, x)[2]

    def to_csv(self, path):
        """Write nodes as ``x,phi,dphi`` with 17 significant digits."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "phi", "dphi"])
            for row in zip(self.xs, self.phis, self.dphis):
                w.writerow([f"{v:.17g}" for v in row])


def dense_eval(traj, x):
    """``(Phi, Phi', Phi'')`` at ``x`` from the dense output.

    ``Phi''`` comes from the ODE where ``|sin Phi| >= delta_sing`` and from the
    nearest vault expansion otherwise.
    """
    phi, dphi = traj.state(x)
    if abs(math.sin(phi)) >= traj.delta_sing:
        return phi, dphi, rhs(x, phi, dphi)
    v = traj._nearest_vault(x)
    if v is None:
        return phi, dphi, rhs(x, phi, dphi)
    return phi, dphi, v.evaluate(x)[2]


def ode_residual(traj, x):
    """Defect of the ODE using the slope of the ``Phi'`` interpolant."""
    phi, dphi = traj.state(x)
    return traj.interpolant_slope(x) - rhs(x, phi, dphi)


def local_taylor(x0, phi0, dphi0, order):
    """Taylor coefficients of the solution through a regular point.

    ``sin(phi0)`` must be nonzero.  The coefficients are generated by
    repeatedly differentiating the ODE (Taylor-series method).
    """
    inv_x = ps.reciprocal_shift(x0, order + 1)
    c = [phi0, dphi0]
    for k in range(order - 1):
        p = c + [0.0]
        dp = ps.deriv(p)
        sq = ps.mul(dp, dp, k + 1)
        sq[0] -= 1.0
        s, co = ps.sin_cos(p, k + 1)
        cot = ps.div(co, s, k + 1)
        t = ps.mul(sq, cot, k + 1)
        one_minus = [-d for d in dp[: k + 1]]
        one_minus[0] += 1.0
        damp = ps.mul(one_minus, inv_x, k + 1)
        c.append((t[k] + damp[k]) / ((k + 1) * (k + 2)))
    return c[: order + 1]


# -- driver ------------------------------------------------------------------

def solve_ivp(a, x_max, tol=1e-10, *, x0=DEFAULT_SEED_X, series_order=DEFAULT_ORDER,
              delta_sing=DELTA_SING, vault_order=VAULT_ORDER, max_dphi=MAX_DPHI,
              max_steps=2_000_000):
    """Integrate from the origin series to ``x_max``.

    Parameters
    ----------
    a : float
        Boundary parameter in ``Phi = x - a x**2 + O(x**3)``.
    x_max : float
        End of the integration range, larger than the seed point ``x0``.
    tol : float
        Local error tolerance (absolute and relative), in ``[1e-14, 1e-6]``.

    Returns
    -------
    SolutionTrajectory
    """
    if not x_max > x0:
        raise InvalidArgumentError(f"x_max = {x_max} must exceed seed point {x0}")
    if not 1e-14 <= tol <= 1e-6:
        raise InvalidArgumentError(f"tol = {tol} outside [1e-14, 1e-6]")
    a = float(a)
    phi, dphi, _ = eval_seed(series_coefficients(a, series_order), x0)

    xs, phis, dphis = [x0], [phi], [dphi]
    dense, segment, vaults = [], [], []
    x = x0
    h = min(1e-2, 0.1 * (x_max - x0))
    err_prev = 1e-4
    n_rejected = 0
    rtol = atol = tol
    last_rejected = False
    sin, cos = math.sin, math.cos

    for _ in range(max_steps):
        if x >= x_max:
            break
        if abs(dphi) > max_dphi:
            raise BlowUpError(f"|Phi'| = {abs(dphi):.3g} exceeds {max_dphi:g} at x = {x:.6g}",
                              last_x=x)
        # the local series about x* has radius of order x*, so shrink the strip near 0
        d_eff = delta_sing * min(1.0, x)
        k_near = round(phi / PI)
        psi = phi - k_near * PI
        if abs(psi) <= 2 * d_eff and psi * dphi < 0:
            v = vault(x, phi, dphi, vault_order)
            x_new = min(v.x_out, x_max)
            if x_new < v.x_out:
                v = VaultExpansion(v.x_star, v.k, v.eps, v.taylor, v.x_in, x_new)
            phi, dphi, _ = v.evaluate(x_new)
            vaults.append(v)
            segment.append(len(vaults) - 1)
            dense.append(_ZERO_DENSE)
            x = x_new
            xs.append(x)
            phis.append(phi)
            dphis.append(dphi)
            h = max(h, 0.5 * d_eff)
            continue

        h = min(h, x_max - x)
        # land on the boundary of the next singular strip instead of entering it
        if dphi != 0:
            s_dir = 1.0 if dphi > 0 else -1.0
            k_next = math.floor(phi / PI) + 1 if s_dir > 0 else math.ceil(phi / PI) - 1
            dist = abs(k_next * PI - phi) - d_eff
            if dist > 0 and abs(dphi) * h > 0.5 * dist:
                acc = s_dir * rhs(x, phi, dphi)
                disc = dphi * dphi + 2 * acc * dist
                if disc > 0:
                    h_land = 2 * dist / (abs(dphi) + math.sqrt(disc))
                    if h_land < h:
                        h = h_land

        if h <= 1e-14 * max(1.0, abs(x)):
            raise IntegrationError(f"step size underflow at x = {x:.15g}", last_x=x)

        k1 = (dphi, rhs(x, phi, dphi))
        ks = [k1]
        for i in range(1, 7):
            ai = _A[i]
            yp = phi
            yd = dphi
            for j, aij in enumerate(ai):
                if aij:
                    yp += h * aij * ks[j][0]
                    yd += h * aij * ks[j][1]
            xi = x + _C[i] * h
            sp = sin(yp)
            if sp == 0.0:
                kd = float("nan")
            else:
                kd = (yd - 1.0) * (yd + 1.0) * cos(yp) / sp + (1.0 - yd) / xi
            ks.append((yd, kd))
        phi_new, dphi_new = yp, yd  # stage 7 is evaluated at the 5th-order solution
        e0 = h * sum(_E[i] * ks[i][0] for i in range(7))
        e1 = h * sum(_E[i] * ks[i][1] for i in range(7))
        sc0 = atol + rtol * max(abs(phi), abs(phi_new))
        # Phi' errors made at distance psi from a crossing grow like 1/psi**2
        w = min(sin(phi) ** 2, sin(phi_new) ** 2)
        sc1 = (atol + rtol * max(abs(dphi), abs(dphi_new))) * max(w, d_eff * d_eff)
        err = math.sqrt(0.5 * ((e0 / sc0) ** 2 + (e1 / sc1) ** 2))

        if not math.isfinite(err):
            n_rejected += 1
            last_rejected = True
            h *= 0.25
            continue
        if err <= 1.0:
            q = [[sum(ks[i][c] * _P[i][m] for i in range(7)) for m in range(4)] for c in (0, 1)]
            dense.append(q)
            segment.append(-1)
            x = x + h
            phi, dphi = phi_new, dphi_new
            xs.append(x)
            phis.append(phi)
            dphis.append(dphi)
            fac = 0.9 * max(err, 1e-10) ** (-0.7 / 5) * err_prev ** (0.4 / 5)
            fac = min(5.0, max(0.2, fac))
            if last_rejected:
                fac = min(fac, 1.0)
            h *= fac
            err_prev = max(err, 1e-4)
            last_rejected = False
        else:
            n_rejected += 1
            last_rejected = True
            h *= max(0.2, 0.9 * err ** (-1 / 5))
    else:
        raise IntegrationError(f"step budget exhausted at x = {x:.6g}", last_x=x)

    return SolutionTrajectory(
        a=a,
        xs=np.array(xs),
        phis=np.array(phis),
        dphis=np.array(dphis),
        vaults=tuple(vaults),
        tol=tol,
        seed_x0=x0,
        dense=np.array(dense, dtype=float).reshape(len(dense), 2, 4),
        segment=np.array(segment, dtype=int),
        delta_sing=delta_sing,
        n_rejected=n_rejected,
    )


_ZERO_DENSE = [[0.0] * 4, [0.0] * 4]
