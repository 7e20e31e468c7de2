"""Extraction of ``(sigma, beta, gamma)`` from a computed trajectory.

On each window ``[X, 2X]`` we regress ``Phi - sigma x`` on ``[ln x, 1]``
(plus ``1/x`` for the refined model) using samples equally spaced in
``ln x``.  The remainder is ``O(1/x)`` and oscillates with ``Phi``, so the
windows are wide compared with the period and the change between the last
two windows serves as the error estimate.
"""

from dataclasses import asdict, dataclass
import json
import math

import numpy as np

from .connection import REGIME_A, REGIME_B, predict, reduce_mod_pi
from .errors import (ClassificationConflictError, InvalidArgumentError,
                     NotAsymptoticError, UnsupportedDomainError)

SAMPLES_PER_WINDOW = 200


@dataclass(frozen=True)
class AsymptoticFit:
    """Result of :func:`fit`.

    ``windows`` holds ``(X_lo, X_hi, beta_w, gamma_w)`` per window; the
    reported ``beta``/``gamma`` come from the last one.
    """

    sigma: int
    beta: float
    gamma: float
    windows: tuple
    drift: float
    refined: bool = False
    a: float = None

    @property
    def regime(self):
        return REGIME_A if self.sigma < 0 else REGIME_B

    def to_json(self, path=None):
        rec = asdict(self)
        rec["windows"] = [list(w) for w in self.windows]
        text = json.dumps(rec, indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


@dataclass(frozen=True)
class Comparison:
    a: float
    regime: str
    beta_error: float
    gamma_error: float
    beta_tol: float
    gamma_tol: float

    @property
    def passed(self):
        return self.beta_error <= self.beta_tol and self.gamma_error <= self.gamma_tol


def design_matrix(x, refined=False, x_ref=None):
    """Regressors ``[ln(x/x_ref), 1]`` plus ``x_ref/x`` when ``refined``.

    ``x_ref`` defaults to the geometric mean of the sample range.  Scaling by
    ``x_ref`` keeps the normal equations conditioned independently of the
    window position.  With coefficients ``c``, ``beta = c0`` and
    ``gamma = c1 - c0 ln x_ref``.
    """
    x = np.asarray(x, dtype=float)
    if x_ref is None:
        x_ref = math.sqrt(x.min() * x.max())
    cols = [np.log(x / x_ref), np.ones_like(x)]
    if refined:
        cols.append(x_ref / x)
    return np.column_stack(cols)


def window_condition_number(X, refined=False, n=SAMPLES_PER_WINDOW):
    """Condition number of the normal equations on ``[X, 2X]``."""
    A = design_matrix(np.geomspace(X, 2 * X, n), refined)
    return float(np.linalg.cond(A.T @ A))


def fit(traj, X_lo=100.0, n_windows=3, refined=False, samples=SAMPLES_PER_WINDOW):
    """Fit ``Phi ~ sigma x + beta ln x + gamma`` on doubling windows.

    Parameters
    ----------
    traj : SolutionTrajectory
        Must extend to ``X_lo * 2**n_windows``.
    X_lo : float
        Left end of the first window.
    n_windows : int
        Number of windows, at least 2.
    refined : bool
        Add a ``1/x`` regressor.

    Raises
    ------
    NotAsymptoticError
        The mean slope on the last window is not within 0.1 of +-1.
    """
    if n_windows < 2:
        raise InvalidArgumentError("n_windows must be >= 2")
    X_hi = X_lo * 2 ** n_windows
    if traj.x_max < X_hi * (1 - 1e-12):
        raise InvalidArgumentError(
            f"trajectory ends at {traj.x_max:g}, fit needs {X_hi:g}")
    edges = [X_lo * 2 ** i for i in range(n_windows + 1)]
    edges[-1] = min(edges[-1], traj.x_max)

    x_last = np.geomspace(edges[-2], edges[-1], samples)
    mean_slope = float(np.mean(traj.sample(x_last)[1]))
    if abs(abs(mean_slope) - 1) > 0.1:
        raise NotAsymptoticError(
            f"mean slope {mean_slope:.4g} on [{edges[-2]:g}, {edges[-1]:g}] is not near +-1")
    sigma = 1 if mean_slope > 0 else -1

    windows = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        x = np.geomspace(lo, hi, samples)
        phi = traj.sample(x)[0]
        x_ref = math.sqrt(lo * hi)
        coef, *_ = np.linalg.lstsq(design_matrix(x, refined, x_ref), phi - sigma * x,
                                   rcond=None)
        beta_w = float(coef[0])
        windows.append((float(lo), float(hi), beta_w, float(coef[1] - beta_w * math.log(x_ref))))
    (_, _, b1, g1), (_, _, b2, g2) = windows[-2], windows[-1]
    drift = max(abs(b2 - b1), abs(g2 - g1))
    return AsymptoticFit(sigma=sigma, beta=b2, gamma=g2, windows=tuple(windows),
                         drift=drift, refined=refined, a=traj.a)


def compare(fitted, pred, beta_tol=1e-3, gamma_tol=1e-2):
    """Discrepancies between a fit and the closed-form prediction.

    In regime A the ``gamma`` discrepancy is taken modulo ``pi``.
    """
    if pred.regime not in (REGIME_A, REGIME_B) or pred.regime != fitted.regime:
        raise ClassificationConflictError(
            f"fit regime {fitted.regime} disagrees with predicted {pred.regime}")
    db = abs(fitted.beta - pred.beta)
    if pred.regime == REGIME_A:
        dg = abs(reduce_mod_pi(fitted.gamma - pred.gamma))
    else:
        dg = abs(fitted.gamma - pred.gamma)
    return Comparison(a=pred.a, regime=pred.regime, beta_error=db, gamma_error=dg,
                      beta_tol=beta_tol, gamma_tol=gamma_tol)


def slope_correction(regime, beta, phi):
    """Coefficient ``c`` in ``Phi' = sigma + c/x + O(x^-2)``, with ``S = Phi/2``.

    Regime A: ``sin 4S + 2 beta sin^2 2S``; regime B: ``2 beta sin^2 2S``.
    """
    S = phi / 2
    s2 = math.sin(2 * S) ** 2
    if regime == REGIME_A:
        return math.sin(4 * S) + 2 * beta * s2
    if regime == REGIME_B:
        return 2 * beta * s2
    raise UnsupportedDomainError("slope correction is defined only in regimes A and B")


def refined_slope_check(traj, X, beta=None):
    """``|Phi'(X) - sigma - c(S)/X|``, which should be ``O(X^-2)``.

    ``beta`` defaults to the closed-form value for ``traj.a``.
    """
    pred = predict(traj.a)
    if pred.regime not in (REGIME_A, REGIME_B):
        raise UnsupportedDomainError("refined slope check is undefined at a = 1/pi")
    b = pred.beta if beta is None else beta
    phi, dphi = traj.state(X)
    return abs(dphi - pred.sigma - slope_correction(pred.regime, b, phi) / X)
