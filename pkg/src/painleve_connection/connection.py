"""Closed-form connection data for the boundary-value family ``Phi = x - a x^2 + ...``.

Three regimes, split at ``a = 1/pi``:

* A, ``a > 1/pi``: ``Phi = -x + beta ln x + gamma + o(1)`` with
  ``beta = -(1/pi) ln(a pi - 1)`` and ``gamma`` known modulo ``pi``.
* B, ``a < 1/pi``: ``Phi = x + beta ln x + gamma + o(1)`` with
  ``beta = (1/pi) ln(1 - a pi)``.
* C, ``a = 1/pi``: ``Phi -> pi/2``.

The monodromy entry ``Q_21`` is known exactly at the origin and
asymptotically at infinity; equating moduli reproduces the ``beta`` formulas,
which is what :func:`modulus_defect` checks.
"""

from dataclasses import dataclass
import cmath
import math

from .errors import InvalidArgumentError, UnsupportedDomainError
from .specfun import arg_gamma, gamma

CRITICAL_A = 1 / math.pi
CLASSIFICATION_TOL = 1e-12
LN2 = math.log(2.0)

REGIME_A = "A"
REGIME_B = "B"
REGIME_C = "C"


@dataclass(frozen=True)
class ConnectionPrediction:
    """Predicted large-``x`` behaviour for one ``a``.

    ``gamma_mod`` is ``"mod_pi"`` in regime A, where only ``gamma mod pi`` is
    determined, and ``"exact"`` otherwise.  In regime C ``beta`` and
    ``gamma`` are ``None`` and ``limit_value`` is ``pi/2``.
    """

    a: float
    regime: str
    beta: float = None
    gamma: float = None
    gamma_mod: str = "exact"
    limit_value: float = None

    @property
    def sigma(self):
        return {REGIME_A: -1, REGIME_B: 1}.get(self.regime, 0)


@dataclass(frozen=True)
class Q21Value:
    value: complex
    source: str

    def __abs__(self):
        return abs(self.value)


def classify_regime(a, tol=CLASSIFICATION_TOL):
    if abs(a - CRITICAL_A) <= tol:
        return REGIME_C
    return REGIME_A if a > CRITICAL_A else REGIME_B


def beta_A(a):
    return -math.log(a * math.pi - 1) / math.pi


def beta_B(a):
    return math.log1p(-a * math.pi) / math.pi


def reduce_mod_pi(g):
    """Representative of ``g mod pi`` in ``(-pi/2, pi/2]``."""
    r = math.remainder(g, math.pi)
    return math.pi / 2 if r == -math.pi / 2 else r


def gamma_A(beta):
    """``pi/2 + 2 arg Gamma(i beta/2 - 1/2) + beta ln 2``, reduced mod ``pi``."""
    g = math.pi / 2 + 2 * arg_gamma(complex(-0.5, beta / 2)) + beta * LN2
    return reduce_mod_pi(g)


def gamma_A_asymptotic(beta):
    """Regime-A ``gamma`` implied by the large-``x`` form of ``Q_21``.

    Equating the phase of :func:`q21_lemmaA` with the origin value
    ``i 2^{-3/4} sqrt(a pi)`` (phase ``pi/2``) and substituting
    ``S = Phi/2 = (-x + beta ln x + gamma)/2`` gives

        gamma = pi/2 + 2 arg Gamma(1/2 - i beta/2) + beta ln 2   (mod pi).

    This differs from :func:`gamma_A`, which has ``Gamma(i beta/2 - 1/2)``;
    the numerically fitted phases follow this form.
    """
    g = math.pi / 2 + 2 * arg_gamma(complex(0.5, -beta / 2)) + beta * LN2
    return reduce_mod_pi(g)


GAMMA_A_FORMS = {"published": gamma_A, "asymptotic": gamma_A_asymptotic}


def gamma_B(beta):
    """``-2 arg Gamma(i beta/2) + beta ln 2 - pi sign(beta)``; zero at ``beta = 0``."""
    if beta == 0:
        return 0.0
    return -2 * arg_gamma(complex(0.0, beta / 2)) + beta * LN2 - math.copysign(math.pi, beta)


def predict(a, tol=CLASSIFICATION_TOL, gamma_form="published"):
    """Regime and closed-form ``(beta, gamma)`` for boundary parameter ``a``.

    ``tol`` is the half-width of the band around ``1/pi`` labelled regime C.
    ``gamma_form`` picks the regime-A phase: ``"published"`` for the published
    connection formula (:func:`gamma_A`) or ``"asymptotic"`` for the form implied
    by the ``Q_21`` asymptotics (:func:`gamma_A_asymptotic`).
    """
    if gamma_form not in GAMMA_A_FORMS:
        raise InvalidArgumentError(f"gamma_form must be one of {sorted(GAMMA_A_FORMS)}")
    a = float(a)
    if not math.isfinite(a):
        raise InvalidArgumentError(f"a must be finite, got {a}")
    regime = classify_regime(a, tol)
    if regime == REGIME_C:
        return ConnectionPrediction(a=a, regime=REGIME_C, limit_value=math.pi / 2)
    if regime == REGIME_A:
        b = beta_A(a)
        return ConnectionPrediction(a=a, regime=REGIME_A, beta=b,
                                    gamma=GAMMA_A_FORMS[gamma_form](b),
                                    gamma_mod="mod_pi")
    b = beta_B(a)
    return ConnectionPrediction(a=a, regime=REGIME_B, beta=b, gamma=gamma_B(b))


def invert_beta(beta, regime):
    """Boundary parameter ``a`` producing ``beta`` in regime A or B."""
    if regime == REGIME_A:
        return (1 + math.exp(-math.pi * beta)) / math.pi
    if regime == REGIME_B:
        return -math.expm1(math.pi * beta) / math.pi
    raise InvalidArgumentError(f"regime must be 'A' or 'B', got {regime!r}")


def q21_origin(a):
    """``(Q)_21 = i 2^{-3/4} sqrt(a pi)`` from the expansion at the origin."""
    if a < 0:
        raise UnsupportedDomainError(f"q21_origin needs a >= 0, got {a}")
    return Q21Value(1j * 2 ** -0.75 * math.sqrt(a * math.pi), "origin")


def q21_lemmaA(beta, S, x):
    """Large-``x`` asymptotic form of ``(Q)_21`` for ``a > 1/pi``."""
    if x <= 0:
        raise InvalidArgumentError(f"x must be positive, got {x}")
    amp = 2 ** -0.25 * math.sqrt(math.pi) * math.exp(-math.pi * beta / 4) / gamma(
        complex(0.5, -beta / 2))
    phase = (S + x / 2 - beta / 2 * math.log(x) - beta / 2 * LN2 + 0.75 * math.pi)
    return Q21Value(amp * cmath.exp(1j * phase), "lemmaA")


def q21_lemmaB(beta, S, x):
    """Large-``x`` asymptotic form of ``(Q)_21`` for ``a < 1/pi``.

    ``sqrt(beta)`` is the principal complex root, so it is imaginary for the
    usual case ``beta < 0``.
    """
    if x <= 0:
        raise InvalidArgumentError(f"x must be positive, got {x}")
    amp = (1j * cmath.sqrt(beta) * 2 ** -0.75 * math.sqrt(math.pi)
           * math.exp(math.pi * beta / 4) / gamma(complex(1.0, beta / 2)))
    phase = -S + x / 2 + beta / 2 * math.log(x) + beta / 2 * LN2
    return Q21Value(amp * cmath.exp(1j * phase), "lemmaB")


def modulus_defect(a, S=0.0, x=1.0):
    """Modulus gap ``| |q21_lemmaX(beta(a))| - |q21_origin(a)| |``, regime A or B."""
    pred = predict(a)
    if pred.regime == REGIME_A:
        lem = q21_lemmaA(pred.beta, S, x)
    elif pred.regime == REGIME_B:
        lem = q21_lemmaB(pred.beta, S, x)
    else:
        raise InvalidArgumentError("modulus identity undefined at a = 1/pi")
    return abs(abs(lem) - abs(q21_origin(a)))
