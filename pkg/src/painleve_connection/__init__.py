"""Connection problem for ``Phi'' = (Phi'^2 - 1) cot Phi + (1 - Phi')/x``.

The solution with ``Phi = x - a x^2 + O(x^3)`` at the origin behaves for
large ``x`` like ``x + beta ln x + gamma`` (``a < 1/pi``), like
``-x + beta ln x + gamma`` (``a > 1/pi``), or tends to ``pi/2``
(``a = 1/pi``).  The package integrates the equation through its singular
lines, fits the large-``x`` parameters, evaluates the closed-form connection
formulas, and checks the Painleve V/III transformations and the
isomonodromy of the associated Lax pair.
"""

__version__ = "0.1.0"

from .connection import CRITICAL_A, predict
from .integrator import solve_ivp
from .asymfit import compare, fit

__all__ = ["CRITICAL_A", "__version__", "compare", "fit", "predict", "solve_ivp"]
