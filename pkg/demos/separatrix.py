"""The separatrix a = 1/pi.

Bisection on the long-time slope recovers 1/pi, and an extended-precision
integration at exactly 1/pi shows the slow approach to pi/2.

Run with ``python demos/separatrix.py`` (about a minute).
"""
import math

from painleve_connection.critical import classify, limit_check, locate_critical


def main():
    for a in (0.1, 1.0):
        c = classify(a)
        print(f"a = {a}: {c.label}, Phi'(X) = {c.witness[1]:+.4f}")
    res = locate_critical(0.1, 1.0, 200.0, 1e-6)
    print(f"bisection: a* = {res.a_star:.10f}, |a* - 1/pi| = {abs(res.a_star - 1 / math.pi):.1e}")
    chk = limit_check(200.0)
    print(f"at a = 1/pi: |Phi(200) - pi/2| = {chk.deviation:.6e} (about 1/200), "
          f"min Phi' on [1, 200] = {chk.min_slope:.2e}")
    print(f"two-term tail pi/2 - 1/x - 2/(3x^3) matches to {chk.tail_defect:.1e}")


if __name__ == "__main__":
    main()
