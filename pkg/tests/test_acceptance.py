"""Acceptance suite: one verdict line per criterion.

Each test asserts the behaviour actually measured, so a criterion that is
known to be unattainable prints FAIL while the test itself passes.
"""
import cmath
import math
import time

import numpy as np
import pytest

from painleve_connection.asymfit import compare, fit
from painleve_connection.connection import modulus_defect, predict
from painleve_connection.critical import limit_check, locate_critical
from painleve_connection.integrator import solve_ivp
from painleve_connection.monodromy import (default_lambda_max, extract_Q, integrate_lambda,
                                           lax_coeffs)
from painleve_connection.seriesseed import residual_slope
from painleve_connection.specfun import gamma, log_gamma, pcf_D, pcf_D_asymptotic
from painleve_connection.transforms import (pair_roundtrip, residual_PIII6, residual_PV4,
                                            residual_PV8, sine_perturbation)

from conftest import record_verdict

X_LO = 100.0
N_WINDOWS = 3  # windows up to 800


def test_criterion_1_exact_solution():
    t0 = time.perf_counter()
    traj = solve_ivp(0.0, 100.0, 1e-12)
    elapsed = time.perf_counter() - t0
    x = np.linspace(0.01, 100.0, 5001)
    err = float(np.max(np.abs(traj.sample(x)[0] - x)))
    ok = err <= 1e-10 and elapsed < 1.0
    record_verdict(1, ok, f"max|phi-x| = {err:.2e}, {elapsed:.2f} s")
    assert ok


def _fit_errors(a, gamma_form="published"):
    t0 = time.perf_counter()
    traj = solve_ivp(a, X_LO * 2 ** N_WINDOWS, 1e-10)
    res = fit(traj, X_LO, N_WINDOWS, refined=True)
    cmp_ = compare(res, predict(a, gamma_form=gamma_form))
    return cmp_.beta_error, cmp_.gamma_error, time.perf_counter() - t0


def test_criterion_2_regime_b():
    rows = [(a, *_fit_errors(a)) for a in (0.05, 0.15, 0.25, 0.30)]
    ok = all(db <= 1e-3 and dg <= 1e-2 and t < 30 for _, db, dg, t in rows)
    worst_b = max(r[1] for r in rows)
    worst_g = max(r[2] for r in rows)
    record_verdict(2, ok, f"max |dbeta| = {worst_b:.2e}, max |dgamma| = {worst_g:.2e}, "
                          f"max time {max(r[3] for r in rows):.1f} s")
    assert ok


def test_criterion_3_regime_a():
    grid = (0.35, 0.5, 1.0)
    rows = [(a, *_fit_errors(a)) for a in grid]
    beta_ok = all(db <= 1e-3 and t < 30 for _, db, _, t in rows)
    gamma_ok = all(dg <= 1e-2 for _, _, dg, _ in rows)
    record_verdict(3, beta_ok and gamma_ok,
                   "published gamma: " + ", ".join(f"a={a}: |dbeta|={db:.1e} |dgamma|={dg:.2f}"
                                                    for a, db, dg, _ in rows))
    alt = [(a, *_fit_errors(a, "asymptotic")) for a in grid]
    alt_ok = all(db <= 1e-3 and dg <= 1e-2 for _, db, dg, _ in alt)
    record_verdict(3, alt_ok, "asymptotic-analysis gamma: max |dgamma| = "
                   f"{max(r[2] for r in alt):.2e}", suffix="b")
    # the published gamma misses; the alternative form matches
    assert beta_ok and not gamma_ok and alt_ok


def test_criterion_4_separatrix():
    t0 = time.perf_counter()
    res = locate_critical(0.1, 1.0, 200.0, 1e-6)
    elapsed = time.perf_counter() - t0
    err = abs(res.a_star - 1 / math.pi)
    ok = err <= 1e-6 and res.X_used <= 3200 and elapsed < 300
    record_verdict(4, ok, f"|a*-1/pi| = {err:.2e}, X_used = {res.X_used:g}, {elapsed:.0f} s")
    assert ok


def test_criterion_5_regime_c():
    chk = limit_check(200.0)
    ok = chk.deviation <= 5e-2 and chk.min_slope >= -1e-8
    record_verdict(5, ok, f"|phi(200)-pi/2| = {chk.deviation:.2e}, "
                          f"min phi' = {chk.min_slope:.2e}")
    assert ok


def test_criterion_6_modulus_identities():
    t0 = time.perf_counter()
    grid_b = np.linspace(0.0, 0.31, 20)
    grid_a = np.linspace(0.33, 3.0, 20)
    worst = max(modulus_defect(float(a), S=1.7, x=12.0) for a in np.concatenate([grid_a, grid_b]))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 1.0
    record_verdict(6, ok, f"max defect = {worst:.1e}")
    assert ok


def _rel(a, b):
    return abs(a - b) / abs(b)


def test_criterion_7_gamma_identities():
    ys = np.linspace(-8.0, 8.0, 41)
    e1 = max(_rel(abs(gamma(0.5 + 1j * y)) ** 2, math.pi / math.cosh(math.pi * y)) for y in ys)
    ys2 = ys[ys != 0]
    e2 = max(_rel(abs(gamma(1j * y)) ** 2,
                  2 * math.pi / (y * (math.exp(y * math.pi) - math.exp(-y * math.pi))))
             for y in ys2)
    zs = [complex(r, i) for r in np.linspace(-4.7, 6.3, 12) for i in np.linspace(-5, 5, 11)]
    e3 = max(_rel(gamma(z + 1), z * gamma(z)) for z in zs)
    e4 = max(_rel(gamma(z) * gamma(1 - z), math.pi / cmath.sin(math.pi * z)) for z in zs)
    worst = max(e1, e2, e3, e4)
    ok = worst <= 1e-12
    record_verdict(7, ok, f"relative errors {e1:.1e}, {e2:.1e}, {e3:.1e}, {e4:.1e}")
    assert ok


def test_criterion_8_parabolic_cylinder():
    zs = [r * cmath.exp(1j * t) for r in np.linspace(0.2, 5.0, 7)
          for t in np.linspace(-math.pi, math.pi, 9)]
    e0 = max(_rel(pcf_D(0, z), cmath.exp(-z * z / 4)) for z in zs)
    e1 = max(_rel(pcf_D(1, z), z * cmath.exp(-z * z / 4)) for z in zs)
    rec = 0.0
    for nu in (0.5, 1.3 - 0.2j, -0.75):
        for z in zs:
            res = pcf_D(nu + 1, z) - z * pcf_D(nu, z) + nu * pcf_D(nu - 1, z)
            rec = max(rec, abs(res) / max(abs(pcf_D(nu + 1, z)), abs(z * pcf_D(nu, z))))
    lead = max(_rel(pcf_D_asymptotic(nu, 20.0), pcf_D(nu, 20.0)) for nu in (0.5, -0.3, 1.7))
    ok = e0 <= 1e-12 and e1 <= 1e-12 and rec <= 1e-9 and lead <= 1e-6
    record_verdict(8, ok, f"D0 {e0:.1e}, D1 {e1:.1e}, recurrence {rec:.1e}, "
                          f"leading asymptotic at |z|=20: {lead:.1e}")
    four = max(_rel(pcf_D_asymptotic(nu, 20.0, n_terms=4), pcf_D(nu, 20.0))
               for nu in (0.5, -0.3, 1.7))
    record_verdict(8, four <= 1e-6, f"four-term asymptotic at |z|=20: {four:.1e}", suffix="b")
    # the leading term alone carries a relative error nu(nu-1)/(2 z^2)
    assert e0 <= 1e-12 and e1 <= 1e-12 and rec <= 1e-9
    assert lead > 1e-6 and four <= 1e-6


def test_criterion_9_transform_chain():
    traj = solve_ivp(0.2, 20.2, 1e-10)
    grid = np.linspace(2.0, 20.0, 181)
    pert = sine_perturbation()
    res = {f.__name__: f(traj, grid).norm for f in (residual_PV4, residual_PIII6, residual_PV8)}
    ctrl = {f.__name__: f(traj, grid, pert).norm
            for f in (residual_PV4, residual_PIII6, residual_PV8)}
    pair = pair_roundtrip(traj, grid).norm
    ok = (max(res.values()) <= 1e-6 and min(ctrl.values()) >= 1e-2 and pair <= 1e-8)
    record_verdict(9, ok, "residuals " + ", ".join(f"{k[9:]} {v:.1e}" for k, v in res.items())
                   + "; controls " + ", ".join(f"{k[9:]} {v:.1e}" for k, v in ctrl.items())
                   + f"; pair round trip {pair:.1e}")
    inv = pair_roundtrip(traj, grid, form="inverse").norm
    record_verdict(9, inv <= 1e-8, f"pair round trip, inverse form: {inv:.1e}", suffix="b")
    assert max(res.values()) <= 1e-6
    # a 1e-3 perturbation yields controls of the same order; the pair as printed fails
    assert ctrl["residual_PV8"] >= 1e-2
    assert 1e-3 < ctrl["residual_PV4"] < 1e-2 and pair > 1e-8 and inv <= 1e-8


def test_criterion_10_isomonodromy():
    traj = solve_ivp(0.2, 10.2, 1e-10)
    co = lax_coeffs(traj, 6.0)
    ident = max(co.identity_defects())
    prop = integrate_lambda(co, default_lambda_max(10.0), 1e-2)
    r6, r10 = extract_Q(traj, 6.0), extract_Q(traj, 10.0)
    dq = float(np.abs(r6.Q - r10.Q).max())
    tol = max(1e-3, r6.truncation_estimate + r10.truncation_estimate)
    ok = ident <= 1e-12 and prop.det_drift <= 1e-8 and dq <= tol
    record_verdict(10, ok, f"identities {ident:.1e}, Wronskian drift {prop.det_drift:.1e}, "
                           f"|Q(6)-Q(10)| = {dq:.1e}, |Q21| ratio {r6.q21_ratio:.8f} (diagnostic)")
    assert ok


def test_criterion_11_series_order():
    slopes = {N: residual_slope(0.2, N) for N in (8, 10, 12)}
    ok = all(s >= N - 1 for N, s in slopes.items())
    record_verdict(11, ok, ", ".join(f"N={N}: {s:.4f}" for N, s in slopes.items()))
    # fitted slopes sit within 1e-3 of N-1 on either side
    assert all(s >= N - 1 - 1e-3 for N, s in slopes.items())
