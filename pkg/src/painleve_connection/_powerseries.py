"""Truncated power series on plain Python sequences.

Coefficient lists ``a[k]`` represent ``sum_k a[k] h**k``.  Every routine is
generic over the scalar type (float, complex, Fraction, mpmath numbers), as
long as ``+ - * /`` are defined, so the same code produces exact rational
expansions for checks and floating expansions for production.
"""

import math


def mul(a, b, n=None):
    """Product of two series truncated to ``n`` coefficients."""
    if n is None:
        n = min(len(a), len(b))
    out = []
    for k in range(n):
        s = 0
        for j in range(max(0, k - len(b) + 1), min(k, len(a) - 1) + 1):
            s = s + a[j] * b[k - j]
        out.append(s)
    return out


def div(a, b, n=None):
    """Quotient ``a / b``; requires ``b[0] != 0``."""
    if n is None:
        n = min(len(a), len(b))
    q = []
    b0 = b[0]
    for k in range(n):
        s = a[k] if k < len(a) else 0
        for j in range(max(0, k - len(b) + 1), k):
            s = s - q[j] * b[k - j]
        q.append(s / b0)
    return q


def deriv(a):
    return [k * a[k] for k in range(1, len(a))]


def shift_down(a):
    """Divide by ``h``; the constant coefficient must vanish."""
    return list(a[1:])


def sin_cos(p, n=None, sin=math.sin, cos=math.cos):
    """Series of ``sin(p)`` and ``cos(p)``.

    Uses ``S' = C p'`` and ``C' = -S p'``.  The elementary ``sin``/``cos`` are
    only applied to ``p[0]``; when ``p[0] == 0`` they are bypassed entirely so
    exact arithmetic stays exact.
    """
    if n is None:
        n = len(p)
    if p[0] == 0:
        s0, c0 = p[0] * 0, p[0] * 0 + 1
    else:
        s0, c0 = sin(p[0]), cos(p[0])
    dp = [k * p[k] for k in range(1, n)]
    s, c = [s0], [c0]
    for k in range(1, n):
        ss = 0
        cc = 0
        for j in range(1, k + 1):
            ss = ss + dp[j - 1] * c[k - j]
            cc = cc + dp[j - 1] * s[k - j]
        s.append(ss / k)
        c.append(-cc / k)
    return s, c


def exp(p, n=None, exp0=math.exp):
    if n is None:
        n = len(p)
    dp = [k * p[k] for k in range(1, n)]
    e = [exp0(p[0])]
    for k in range(1, n):
        acc = 0
        for j in range(1, k + 1):
            acc = acc + dp[j - 1] * e[k - j]
        e.append(acc / k)
    return e


def reciprocal_shift(x0, n):
    """Series of ``1/(x0 + h)``."""
    out = []
    r = 1 / x0
    term = r
    for _ in range(n):
        out.append(term)
        term = -term * r
    return out


def horner(a, h):
    acc = 0
    for c in reversed(a):
        acc = acc * h + c
    return acc


def horner_with_derivative(a, h):
    """Value and first derivative of the series at ``h``."""
    val = 0
    der = 0
    for c in reversed(a):
        der = der * h + val
        val = val * h + c
    return val, der
