"""Numerical isomonodromy of the ``lambda``-equation of the PV Lax pair.

For each ``x`` we build

    dPsi/dlambda = (-i tau sigma3 + A1/lambda + A2/lambda^2) Psi,
    A1 = [[1/4, u], [v, -1/4]],  A2 = [[z, q], [q, -z]],

with ``tau = -x^2/8`` and the coefficients taken from ``h(tau)``.  The
canonical solution at infinity is started at ``lambda_max`` from its formal
series, carried down to ``lambda_min`` with a fourth-order Magnus method, and
compared there with the canonical solution at zero.  The connection matrix
``Q = Psi0^{-1} Psi_inf`` should not depend on ``x``.

Formal solutions used (``m_0 = g_0 = I``):

    Psi_inf = (sum m_k lambda^-k) lambda^(sigma3/4) exp(-i tau lambda sigma3) d^sigma3
    Psi_0   = H (sum g_k lambda^k) lambda^D exp(-Lam/lambda) dt^sigma3

where ``H^{-1} A2 H = Lam = -(i/8) sigma3``, ``D = diag(H^{-1} A1 H)``,
``d = tau^(1/8) e^J`` and ``dt = tau^(1/8) e^-J``.
"""

from dataclasses import dataclass, field
import cmath
import json
import math

import numpy as np
from scipy import integrate

from .errors import (ConditioningError, InvalidArgumentError, PathSingularityError,
                     SingularCoefficientError)
from .transforms import _h_tau_derivs, solution_jet

DEGENERACY_TOL = 1e-6
STEP_FACTOR = 0.1
SERIES_TERMS = 4
DEFAULT_C = 1.0
DEFAULT_LAMBDA_MIN = 1e-2
TAU_LAMBDA_MIN = 50.0

SIGMA3 = np.diag([1.0 + 0j, -1.0])
SIGMA1 = np.array([[0j, 1.0], [1.0, 0j]])


@dataclass(frozen=True)
class LaxCoefficients:
    """Coefficients of the Lax pair at one point ``x``.

    ``sqrt(h)`` is ``branch`` times the principal root; see :func:`sqrt_branch`.
    """

    x: float
    tau: float
    h: float
    h_tau: float
    z: complex
    q: complex
    u: complex
    v: complex
    g: float
    branch: int = 1

    @property
    def A1(self):
        return np.array([[0.25, self.u], [self.v, -0.25]], dtype=complex)

    @property
    def A2(self):
        return np.array([[self.z, self.q], [self.q, -self.z]], dtype=complex)

    def identity_defects(self):
        """Defects of ``z^2 + q^2 = -1/64`` and ``q(u+v) = i/(8(h-1))``."""
        d1 = abs(self.z ** 2 + self.q ** 2 + 1 / 64) * 64
        target = 1j / (8 * (self.h - 1))
        d2 = abs(self.q * (self.u + self.v) - target) / abs(target)
        return d1, d2


def sqrt_branch(traj, x):
    """Sign that makes ``sqrt(h)`` and ``sqrt(h - 1)`` continuous in ``x``.

    Near the origin ``0 < h < 1`` and the principal roots are used.  Where
    ``Phi`` crosses an odd multiple of ``pi`` with ``Phi' = 1``, ``Phi' - 1``
    has a double zero, ``h`` a double pole, and the analytic continuation of
    both roots changes sign while the principal roots do not.  Each such
    crossing below ``x`` flips the sign.
    """
    n = sum(1 for v in traj.vaults if v.x_star < x and v.k % 2 and v.eps > 0)
    return -1 if n % 2 else 1


def coeffs_from_h(x, h, h_tau, branch=1):
    """Build :class:`LaxCoefficients` from ``h`` and ``dh/dtau``."""
    if abs(h) < DEGENERACY_TOL or abs(h - 1) < DEGENERACY_TOL:
        raise SingularCoefficientError(f"h = {h:.6g} is degenerate at x = {x:g}")
    tau = -x * x / 8
    sh = branch * cmath.sqrt(h)
    z = -0.125j * (h + 1) / (h - 1)
    q = -0.25 * sh / (h - 1)
    s = -0.5j / sh
    d = 1j * tau * h_tau / ((1 - h) * sh)
    g = (1 + 1 / h) / (8 * tau)
    return LaxCoefficients(x=float(x), tau=tau, h=float(h), h_tau=float(h_tau), z=z, q=q,
                           u=(s + d) / 2, v=(s - d) / 2, g=float(g), branch=branch)


def lax_coeffs(traj, x):
    """Lax-pair coefficients along a trajectory, with ``h`` from the direct relation.

    Raises
    ------
    SingularCoefficientError
        ``Phi' - 1``, ``h`` or ``h - 1`` within ``1e-6`` of zero.
    """
    c = solution_jet(traj, float(x))
    if abs(c[1] - 1) < DEGENERACY_TOL:
        raise SingularCoefficientError(f"Phi' = 1 at x = {x:g}")
    h, h_tau, _ = _h_tau_derivs(float(x), c)
    return coeffs_from_h(x, h, h_tau, sqrt_branch(traj, x))


# -- J --------------------------------------------------------------------------

def _inv_h(traj, x):
    # 1/h = (Phi'-1)/(Phi'-1+2 sin^2(Phi/2)), finite where h has a pole
    phi, dphi = traj.state(x)
    n = dphi - 1
    return n / (n + 2 * math.sin(phi / 2) ** 2)


def _h_denominator(traj, xs):
    phi, dphi = traj.sample(xs)[:2]
    return dphi - 1 + 2 * np.sin(phi / 2) ** 2


def path_zeros_of_h(traj, x_from, x_to, n=4000):
    """Intervals of ``x`` between the endpoints where ``h`` changes sign through zero."""
    lo, hi = sorted((x_from, x_to))
    xs = np.linspace(lo, hi, n)
    den = _h_denominator(traj, xs)
    idx = np.nonzero(np.sign(den[:-1]) * np.sign(den[1:]) <= 0)[0]
    return [(float(xs[i]), float(xs[i + 1])) for i in idx]


def compute_J(traj, c=DEFAULT_C, tau=None, x=None, epsabs=1e-13, epsrel=1e-13):
    """``J(tau) = (1/8) int_{-c}^{tau} dt/(t h(t))`` along the negative real axis.

    With ``t = -x'^2/8`` this is ``(1/4) int_{sqrt(8c)}^{x} dx'/(x' h(x'))``.
    Give either ``tau`` (< 0) or ``x`` (> 0).

    Raises
    ------
    PathSingularityError
        ``h`` vanishes between ``-c`` and ``tau``.
    """
    if c <= 0:
        raise InvalidArgumentError(f"c must be positive, got {c}")
    if (tau is None) == (x is None):
        raise InvalidArgumentError("give exactly one of tau, x")
    if x is None:
        if tau >= 0:
            raise InvalidArgumentError(f"tau must be negative, got {tau}")
        x = math.sqrt(-8 * tau)
    x_c = math.sqrt(8 * c)
    if min(x, x_c) < traj.xs[0] or max(x, x_c) > traj.x_max:
        raise InvalidArgumentError("integration path leaves the trajectory range")
    if x == x_c:
        return 0.0
    bad = path_zeros_of_h(traj, x_c, x)
    if bad:
        raise PathSingularityError(f"h vanishes on the path near x in {bad}")
    pts = [v.x_star for v in traj.vaults if min(x, x_c) < v.x_star < max(x, x_c)]
    val, _ = integrate.quad(lambda s: _inv_h(traj, s) / s, x_c, x, epsabs=epsabs,
                            epsrel=epsrel, limit=500, points=pts or None)
    return 0.25 * val


# -- formal solutions --------------------------------------------------------------

def formal_series_infinity(coeffs, n_terms=SERIES_TERMS):
    """Matrices ``m_0 .. m_{n_terms}`` of the expansion at ``lambda = infinity``."""
    tau = coeffs.tau
    A1, A2 = coeffs.A1, coeffs.A2
    m = [np.eye(2, dtype=complex)]
    zero = np.zeros((2, 2), dtype=complex)
    for k in range(n_terms):
        prev = m[k - 1] if k >= 1 else zero
        R = A1 @ m[k] + A2 @ prev + k * m[k] - m[k] @ SIGMA3 / 4
        nxt = np.zeros((2, 2), dtype=complex)
        nxt[0, 1] = R[0, 1] / (2j * tau)
        nxt[1, 0] = -R[1, 0] / (2j * tau)
        kk = k + 1
        P = A2 @ m[k]
        nxt[0, 0] = -(coeffs.u * nxt[1, 0] + P[0, 0]) / kk
        nxt[1, 1] = -(coeffs.v * nxt[0, 1] + P[1, 1]) / kk
        m.append(nxt)
    return m


def H_matrix(h, branch=1):
    """``(i sigma3 sqrt(h) + sigma1)/sqrt(h - 1)``; both roots carry ``branch``."""
    h = complex(h)
    return (1j * SIGMA3 * branch * cmath.sqrt(h) + SIGMA1) / (branch * cmath.sqrt(h - 1))


def formal_series_zero(coeffs, n_terms=SERIES_TERMS):
    """``(H, Lam, D, [g_0 .. g_{n_terms}])`` of the expansion at ``lambda = 0``."""
    H = H_matrix(coeffs.h, coeffs.branch)
    Hi = np.linalg.inv(H)
    B2 = Hi @ coeffs.A2 @ H
    B1 = Hi @ coeffs.A1 @ H
    B0 = Hi @ (-1j * coeffs.tau * SIGMA3) @ H
    mu = B2[0, 0]
    Lam = np.diag([mu, -mu])
    D = np.diag(np.diag(B1))
    g = [np.eye(2, dtype=complex)]
    zero = np.zeros((2, 2), dtype=complex)
    for k in range(1, n_terms + 1):
        prev2 = g[k - 2] if k >= 2 else zero
        S = (k - 1) * g[k - 1] + g[k - 1] @ D - B1 @ g[k - 1] - B0 @ prev2
        gk = np.zeros((2, 2), dtype=complex)
        gk[0, 1] = S[0, 1] / (2 * mu)
        gk[1, 0] = -S[1, 0] / (2 * mu)
        P = B0 @ g[k - 1]
        gk[0, 0] = (B1[0, 1] * gk[1, 0] + P[0, 0]) / k
        gk[1, 1] = (B1[1, 0] * gk[0, 1] + P[1, 1]) / k
        g.append(gk)
    return H, Lam, D, g


def _d_factors(tau, J):
    root = complex(tau) ** 0.125
    return root * cmath.exp(J), root * cmath.exp(-J)


def psi_infinity(coeffs, lam, J=0.0, n_terms=SERIES_TERMS):
    """Truncated canonical solution at infinity and the first omitted term's size."""
    m = formal_series_infinity(coeffs, n_terms + 1)
    F = sum(m[k] * lam ** (-k) for k in range(n_terms + 1))
    tail = float(np.abs(m[n_terms + 1]).max()) * lam ** (-(n_terms + 1))
    d, _ = _d_factors(coeffs.tau, J)
    ph = cmath.exp(-1j * coeffs.tau * lam)
    right = np.diag([lam ** 0.25 * ph * d, lam ** -0.25 / ph / d])
    return F @ right, tail


def psi_zero(coeffs, lam, J=0.0, n_terms=SERIES_TERMS):
    """Truncated canonical solution at zero and the first omitted term's size."""
    H, Lam, D, g = formal_series_zero(coeffs, n_terms + 1)
    G = sum(g[k] * lam ** k for k in range(n_terms + 1))
    tail = float(np.abs(g[n_terms + 1]).max()) * lam ** (n_terms + 1)
    _, dt = _d_factors(coeffs.tau, J)
    e = [cmath.exp(D[i, i] * math.log(lam) - Lam[i, i] / lam) for i in range(2)]
    right = np.diag([e[0] * dt, e[1] / dt])
    return H @ G @ right, tail


# -- lambda integration ------------------------------------------------------------

def _expm_traceless(M):
    """``exp(M)`` for a trace-free 2x2 matrix."""
    s = cmath.sqrt(-np.linalg.det(M))
    if abs(s) < 1e-4:
        s2 = s * s
        ch = 1 + s2 / 2 + s2 * s2 / 24
        sh = 1 + s2 / 6 + s2 * s2 / 120
    else:
        ch = cmath.cosh(s)
        sh = cmath.sinh(s) / s
    return ch * np.eye(2) + sh * M


@dataclass(frozen=True)
class LambdaPropagation:
    """Propagator ``U`` with ``Psi(lambda_min) = U Psi(lambda_max)``."""

    U: np.ndarray
    lambda_max: float
    lambda_min: float
    n_steps: int
    det_drift: float


def integrate_lambda(coeffs, lambda_max, lambda_min=DEFAULT_LAMBDA_MIN,
                     step_factor=STEP_FACTOR, max_steps=5_000_000):
    """Propagate the ``lambda``-equation from ``lambda_max`` down to ``lambda_min``.

    Fourth-order Magnus steps of length at most
    ``step_factor / (|tau| + |A1|/lambda + |A2|/lambda^2)``.  The system is
    trace-free, so ``det U = 1``; ``det_drift`` is ``|det U - 1|``.
    """
    if not 0 < lambda_min < lambda_max:
        raise InvalidArgumentError("need 0 < lambda_min < lambda_max")
    tau = coeffs.tau
    A0 = -1j * tau * SIGMA3
    A1, A2 = coeffs.A1, coeffs.A2
    n1 = float(np.abs(A1).max())
    n2 = float(np.abs(A2).max())
    c1 = 0.5 - math.sqrt(3) / 6
    c2 = 0.5 + math.sqrt(3) / 6
    k3 = math.sqrt(3) / 12

    def A(l):
        return A0 + A1 / l + A2 / (l * l)

    U = np.eye(2, dtype=complex)
    lam = lambda_max
    steps = 0
    while lam > lambda_min:
        dl = step_factor / (abs(tau) + n1 / lam + n2 / (lam * lam))
        # keep the cap valid over the step, where 1/lambda grows
        dl = min(dl, 0.25 * lam, lam - lambda_min)
        h = -dl
        Aa = A(lam + c1 * h)
        Ab = A(lam + c2 * h)
        Om = 0.5 * h * (Aa + Ab) + k3 * h * h * (Ab @ Aa - Aa @ Ab)
        U = _expm_traceless(Om) @ U
        lam -= dl
        steps += 1
        if steps > max_steps:
            raise ConditioningError(f"step budget exhausted at lambda = {lam:g}")
    return LambdaPropagation(U=U, lambda_max=lambda_max, lambda_min=lambda_min,
                             n_steps=steps, det_drift=abs(np.linalg.det(U) - 1))


# -- connection matrix -------------------------------------------------------------

def _complex_matrix_to_json(Q):
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(Q)]


@dataclass(frozen=True)
class MonodromyRecord:
    """Connection matrix at one ``x``.

    ``truncation_estimate`` bounds the relative error in ``Q`` from
    truncating both formal solutions; ``det_drift`` is the Wronskian defect
    of the propagation.
    """

    a: float
    x: float
    lambda_min: float
    lambda_max: float
    Q: np.ndarray = field(repr=False)
    truncation_estimate: float
    c_norm: float
    J: float
    det_drift: float
    n_steps: int

    @property
    def q21_ratio(self):
        """``|Q_21| / (2^{-3/4} sqrt(a pi))``, a diagnostic (depends on ``c``)."""
        return abs(self.Q[1, 0]) / (2 ** -0.75 * math.sqrt(self.a * math.pi))

    def to_json(self, path=None):
        rec = {"a": self.a, "x": self.x, "lambda_min": self.lambda_min,
               "lambda_max": self.lambda_max, "Q": _complex_matrix_to_json(self.Q),
               "truncation_estimate": self.truncation_estimate, "c_norm": self.c_norm,
               "J": self.J, "det_drift": self.det_drift, "n_steps": self.n_steps,
               "q21_ratio": self.q21_ratio if self.a > 0 else None}
        text = json.dumps(rec, indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


def default_lambda_max(x):
    """Smallest ``lambda_max`` with ``|tau| lambda_max >= 50``."""
    return TAU_LAMBDA_MIN / (x * x / 8)


def extract_Q(traj, x, c=DEFAULT_C, lambda_max=None, lambda_min=DEFAULT_LAMBDA_MIN,
              n_terms=SERIES_TERMS, step_factor=STEP_FACTOR):
    """Connection matrix ``Q = Psi0(lambda_min)^{-1} Psi_inf(lambda_min)`` at ``x``.

    Raises
    ------
    InvalidArgumentError
        ``|tau| lambda_max < 50`` or ``lambda_min > 1e-2``.
    ConditioningError
        ``Psi0`` at ``lambda_min`` is numerically singular.
    """
    coeffs = lax_coeffs(traj, x)
    if lambda_max is None:
        lambda_max = default_lambda_max(x)
    if abs(coeffs.tau) * lambda_max < TAU_LAMBDA_MIN * (1 - 1e-12):
        raise InvalidArgumentError(f"|tau| lambda_max = {abs(coeffs.tau) * lambda_max:g} < 50")
    if lambda_min > DEFAULT_LAMBDA_MIN:
        raise InvalidArgumentError(f"lambda_min must be <= 1e-2, got {lambda_min}")
    J = compute_J(traj, c, x=x)
    prop = integrate_lambda(coeffs, lambda_max, lambda_min, step_factor)
    psi_inf, tail_inf = psi_infinity(coeffs, lambda_max, J, n_terms)
    psi0, tail0 = psi_zero(coeffs, lambda_min, J, n_terms)
    cond = np.linalg.cond(psi0)
    if not np.isfinite(cond) or cond > 1e12:
        raise ConditioningError(f"Psi0 at lambda_min has condition number {cond:.3g}")
    Q = np.linalg.solve(psi0, prop.U @ psi_inf)
    return MonodromyRecord(a=traj.a, x=float(x), lambda_min=lambda_min,
                           lambda_max=lambda_max, Q=Q,
                           truncation_estimate=(tail_inf + tail0) * cond, c_norm=c, J=J,
                           det_drift=prop.det_drift, n_steps=prop.n_steps)
