"""Isomonodromy: the connection matrix does not depend on x.

Q is extracted from the linear lambda-system at several x along the a = 0.2
trajectory.  Its entries stay fixed, and |Q21| matches 2^{-3/4} sqrt(a pi).

Run with ``python demos/monodromy.py``.
"""
import numpy as np

from painleve_connection.integrator import solve_ivp
from painleve_connection.monodromy import extract_Q


def main():
    traj = solve_ivp(0.2, 16.5, 1e-10)
    ref = None
    for x in (4.0, 6.0, 10.0, 16.0):
        rec = extract_Q(traj, x)
        ref = rec.Q if ref is None else ref
        print(f"x = {x:5.1f}  Q21 = {rec.Q[1, 0]:.10f}  "
              f"max|Q - Q(4)| = {np.abs(rec.Q - ref).max():.1e}  "
              f"truncation {rec.truncation_estimate:.1e}  |Q21| ratio {rec.q21_ratio:.8f}")


if __name__ == "__main__":
    main()
