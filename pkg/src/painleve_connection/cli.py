"""Command-line front end.

Every command writes its data files and a ``run_<command>.json`` record to
the output directory (``--out-dir``, else ``$PAINLEVE_OUT_DIR``, else
``./painleve_out``).  Exit codes: 0 success, 1 bad flags or a FAIL verdict,
2 numerical failure (integration, conditioning, overflow).
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
import csv
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .asymfit import compare, fit
from .connection import REGIME_C, predict
from .critical import locate_critical
from .errors import BracketingError, InvalidArgumentError, PainleveError
from .integrator import solve_ivp
from .monodromy import DEFAULT_C, DEFAULT_LAMBDA_MIN, extract_Q
from .transforms import (pair_roundtrip, residual_PIII6, residual_PV4, residual_PV8,
                         sine_perturbation)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_NUMERIC = 2

DEFAULT_VERIFY_GRID = (0.05, 0.15, 0.25, 0.35, 0.5, 1.0)
RESIDUAL_TOL = 1e-6
PAIR_TOL = 1e-8


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_FAIL, f"{self.prog}: error: {message}\n")


def _fmt(v):
    return f"{v:.17g}"


def _write_two_column(path, xs, ys):
    with open(path, "w") as fh:
        for x, y in zip(xs, ys):
            fh.write(f"{_fmt(x)} {_fmt(y)}\n")


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _tag(a):
    return f"a{float(a)!r}"


def _positive(s):
    v = float(s)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be positive, got {s}")
    return v


def _float_list(s):
    try:
        return [float(t) for t in s.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}")


def _grid(s):
    """``lo:hi:n`` (inclusive linspace) or a comma list."""
    if ":" in s:
        try:
            lo, hi, n = s.split(":")
            return list(np.linspace(float(lo), float(hi), int(n)))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected lo:hi:n, got {s!r}")
    return _float_list(s)


# -- commands ---------------------------------------------------------------------
# each returns (exit_code, outputs, result_dict)

def cmd_solve(args, out):
    traj = solve_ivp(args.a, args.x_max, args.tol)
    base = os.path.join(out, f"solve_{_tag(args.a)}")
    traj.to_csv(base + ".csv")
    _write_two_column(base + "_phi.dat", traj.xs, traj.phis)
    summary = {"a": args.a, "x_max": traj.x_max, "tol": args.tol, "n_nodes": len(traj.xs),
               "n_rejected": traj.n_rejected,
               "crossings": [{"x_star": x, "k": k, "eps": e} for x, k, e in traj.crossings]}
    _write_json(base + "_summary.json", summary)
    print(f"a = {args.a}: {len(traj.xs)} nodes to x = {traj.x_max:g}, "
          f"{len(traj.crossings)} crossings, Phi(x_max) = {traj.phis[-1]:.12g}")
    return EXIT_OK, [base + ".csv", base + "_phi.dat", base + "_summary.json"], summary


def cmd_fit(args, out):
    X_hi = args.x_lo * 2 ** args.windows
    traj = solve_ivp(args.a, X_hi, args.tol)
    res = fit(traj, args.x_lo, args.windows, refined=args.refined)
    path = os.path.join(out, f"fit_{_tag(args.a)}.json")
    res.to_json(path)
    print(f"a = {args.a}: sigma = {res.sigma:+d}, beta = {res.beta:.10g}, "
          f"gamma = {res.gamma:.10g}, drift = {res.drift:.3g}")
    return EXIT_OK, [path], json.loads(res.to_json())


def cmd_predict(args, out):
    pred = predict(args.a, args.class_tol, args.gamma_form)
    rec = {"a": pred.a, "regime": pred.regime, "beta": pred.beta, "gamma": pred.gamma,
           "gamma_mod": pred.gamma_mod, "limit_value": pred.limit_value}
    path = os.path.join(out, f"predict_{_tag(args.a)}.json")
    _write_json(path, rec)
    if pred.regime == REGIME_C:
        print(f"a = {args.a}: regime C (separatrix), Phi -> pi/2 = {math.pi / 2:.17g}")
    else:
        mod = " (mod pi)" if pred.gamma_mod == "mod_pi" else ""
        print(f"a = {args.a}: regime {pred.regime}, beta = {pred.beta:.17g}, "
              f"gamma = {pred.gamma:.17g}{mod}")
    return EXIT_OK, [path], rec


def _transform_checks(a, grid, tol, pair_form):
    traj = solve_ivp(a, max(grid) * 1.01, tol)
    pert = sine_perturbation()
    rows = []
    reports = {}
    for name, fn in (("PV4", residual_PV4), ("PIII6", residual_PIII6), ("PV8", residual_PV8)):
        rep = fn(traj, grid)
        ctrl = fn(traj, grid, pert)
        reports[name] = rep
        rows.append((name, rep.norm, RESIDUAL_TOL, rep.norm <= RESIDUAL_TOL,
                     float(np.nanmax(ctrl.residuals))))
    rep = pair_roundtrip(traj, grid, form=pair_form)
    reports["pair7"] = rep
    rows.append(("pair7", rep.norm, PAIR_TOL, rep.norm <= PAIR_TOL, float("nan")))
    return rows, reports


def cmd_verify_transforms(args, out):
    rows, reports = _transform_checks(args.a, args.grid, args.tol, args.pair_form)
    outputs = []
    for name, rep in reports.items():
        path = os.path.join(out, f"residual_{name}_{_tag(args.a)}.csv")
        rep.to_csv(path)
        outputs.append(path)
    print(f"{'equation':8s} {'max residual':>14s} {'tol':>8s} {'control max':>12s}  verdict")
    ok = True
    table = []
    for name, norm, tol, passed, ctrl in rows:
        ok &= bool(passed)
        print(f"{name:8s} {norm:14.3e} {tol:8.0e} {ctrl:12.3e}  {'PASS' if passed else 'FAIL'}")
        table.append({"equation": name, "max_residual": norm, "tol": tol,
                      "control_max": None if math.isnan(ctrl) else ctrl, "pass": bool(passed)})
    return (EXIT_OK if ok else EXIT_FAIL), outputs, {"rows": table}


def cmd_critical(args, out):
    res = locate_critical(args.lo, args.hi, args.x, args.tol, args.integrator_tol)
    path = os.path.join(out, "critical_trace.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iter", "a_lo", "a_hi", "label"])
        for it, lo, hi, label in res.trace:
            w.writerow([it, _fmt(lo), _fmt(hi), label])
    dat = os.path.join(out, "critical_trace.dat")
    _write_two_column(dat, [r[0] for r in res.trace],
                      [0.5 * (r[1] + r[2]) for r in res.trace])
    print(f"a* = {res.a_star:.10f}  (1/pi = {1 / math.pi:.10f}, "
          f"difference {res.a_star - 1 / math.pi:.2e}, X used {res.X_used:g})")
    return EXIT_OK, [path, dat], {"a_star": res.a_star, "X_used": res.X_used,
                                  "iterations": len(res.trace)}


def cmd_monodromy(args, out):
    xs = args.x or [6.0, 10.0]
    traj = solve_ivp(args.a, max(xs) * 1.01, args.tol)
    recs = []
    outputs = []
    for x in xs:
        rec = extract_Q(traj, x, args.c, args.lambda_max, args.lambda_min)
        path = os.path.join(out, f"monodromy_{_tag(args.a)}_x{float(x)!r}.json")
        rec.to_json(path)
        outputs.append(path)
        recs.append(rec)
        print(f"x = {x:g}: lambda_max = {rec.lambda_max:.4g}, truncation = "
              f"{rec.truncation_estimate:.2e}, det drift = {rec.det_drift:.1e}")
        for i in range(2):
            print("   " + "  ".join(f"{rec.Q[i, j].real:+.12f}{rec.Q[i, j].imag:+.12f}i"
                                    for j in range(2)))
        if args.a > 0:
            print(f"   |Q21| / (2^(-3/4) sqrt(a pi)) = {rec.q21_ratio:.12f}")
    result = {"x": list(xs)}
    if len(recs) > 1:
        ref = recs[0].Q
        defect = max(float(np.max(np.abs(r.Q - ref) / np.abs(ref))) for r in recs[1:])
        print(f"constancy defect (max entrywise relative) = {defect:.3e}")
        result["constancy_defect"] = defect
    return EXIT_OK, outputs, result


def _verify_row(job):
    a, x_lo, windows, tol, refined, beta_tol, gamma_tol, gamma_form = job
    pred = predict(a, gamma_form=gamma_form)
    try:
        traj = solve_ivp(a, x_lo * 2 ** windows, tol)
        res = fit(traj, x_lo, windows, refined=refined)
        cmp_ = compare(res, pred, beta_tol, gamma_tol)
        return {"a": a, "regime": pred.regime, "beta_fit": res.beta, "gamma_fit": res.gamma,
                "beta_pred": pred.beta, "gamma_pred": pred.gamma,
                "beta_error": cmp_.beta_error, "gamma_error": cmp_.gamma_error,
                "pass": cmp_.passed, "error": None}
    except PainleveError as exc:
        return {"a": a, "regime": pred.regime, "pass": False, "error": repr(exc)}


def cmd_verify(args, out):
    grid = sorted(args.grid)
    near = [a for a in grid if abs(a - 1 / math.pi) < 1e-3]
    if near:
        raise argparse.ArgumentTypeError(f"grid values within 1e-3 of 1/pi: {near}")
    jobs = [(a, args.x_lo, args.windows, args.tol, args.refined, args.beta_tol,
             args.gamma_tol, args.gamma_form) for a in grid]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            rows = list(ex.map(_verify_row, jobs))
    else:
        rows = [_verify_row(j) for j in jobs]
    rows.sort(key=lambda r: r["a"])
    path = os.path.join(out, "verify.csv")
    cols = ["a", "regime", "beta_fit", "beta_pred", "beta_error", "gamma_fit",
            "gamma_pred", "gamma_error", "pass"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(r[c]) if isinstance(r.get(c), float) else r.get(c, "")
                        for c in cols])
    print(f"{'a':>8s} {'regime':>6s} {'|dbeta|':>10s} {'|dgamma|':>10s}  verdict")
    for r in rows:
        if r["error"]:
            print(f"{r['a']:8.4g} {r['regime']:>6s} {'-':>10s} {'-':>10s}  FAIL ({r['error']})")
        else:
            print(f"{r['a']:8.4g} {r['regime']:>6s} {r['beta_error']:10.2e} "
                  f"{r['gamma_error']:10.2e}  {'PASS' if r['pass'] else 'FAIL'}")
    ok = all(r["pass"] for r in rows)
    return (EXIT_OK if ok else EXIT_FAIL), [path], {"rows": rows}


# -- parser -----------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="painleve-connection",
                description="Connection problem for Phi'' = (Phi'^2-1) cot Phi + (1-Phi')/x.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--out-dir", default=None,
                   help="output directory (default $PAINLEVE_OUT_DIR or ./painleve_out)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="integrate one trajectory")
    s.add_argument("--a", type=float, required=True)
    s.add_argument("--x-max", type=_positive, required=True)
    s.add_argument("--tol", type=_positive, default=1e-10)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("fit", help="fit (sigma, beta, gamma) on doubling windows")
    s.add_argument("--a", type=float, required=True)
    s.add_argument("--x-lo", type=_positive, default=100.0)
    s.add_argument("--windows", type=int, default=3)
    s.add_argument("--tol", type=_positive, default=1e-10)
    s.add_argument("--refined", action="store_true", help="add a 1/x regressor")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("predict", help="closed-form regime and (beta, gamma)")
    s.add_argument("--a", type=float, required=True)
    s.add_argument("--class-tol", type=_positive, default=1e-11,
                   help="half-width of the regime-C band around 1/pi (default 1e-11)")
    s.add_argument("--gamma-form", choices=("published", "asymptotic"), default="published")
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("verify-transforms", help="residuals of the transformation chain")
    s.add_argument("--a", type=float, default=0.2)
    s.add_argument("--grid", type=_grid, default=_grid("2:20:181"), help="lo:hi:n or a,b,c")
    s.add_argument("--tol", type=_positive, default=1e-10)
    s.add_argument("--pair-form", choices=("published", "inverse"), default="published")
    s.set_defaults(func=cmd_verify_transforms)

    for name in ("critical", "critical-scan"):
        s = sub.add_parser(name, help="bisect for the separatrix parameter")
        s.add_argument("--lo", type=float, default=0.1)
        s.add_argument("--hi", type=float, default=1.0)
        s.add_argument("--tol", type=_positive, default=1e-6, help="bisection tolerance")
        s.add_argument("--x", type=_positive, default=200.0, help="classification abscissa")
        s.add_argument("--integrator-tol", type=_positive, default=1e-10)
        s.set_defaults(func=cmd_critical)

    s = sub.add_parser("monodromy", help="connection matrix Q at one or more x")
    s.add_argument("--a", type=float, required=True)
    s.add_argument("--x", type=_positive, action="append")
    s.add_argument("--c", type=_positive, default=DEFAULT_C)
    s.add_argument("--lambda-max", type=_positive, default=None)
    s.add_argument("--lambda-min", type=_positive, default=DEFAULT_LAMBDA_MIN)
    s.add_argument("--tol", type=_positive, default=1e-12)
    s.set_defaults(func=cmd_monodromy)

    s = sub.add_parser("verify", help="solve, fit and compare on a grid of a")
    s.add_argument("--grid", type=_float_list, default=list(DEFAULT_VERIFY_GRID))
    s.add_argument("--x-lo", type=_positive, default=100.0)
    s.add_argument("--windows", type=int, default=3)
    s.add_argument("--tol", type=_positive, default=1e-10)
    s.add_argument("--refined", action=argparse.BooleanOptionalAction, default=True)
    s.add_argument("--beta-tol", type=_positive, default=1e-3)
    s.add_argument("--gamma-tol", type=_positive, default=1e-2)
    s.add_argument("--gamma-form", choices=("published", "asymptotic"), default="published")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_verify)
    return p


def _params(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}


def _out_dir(value):
    return value or os.environ.get("PAINLEVE_OUT_DIR") or "painleve_out"


def _record_parse_failure(argv, code):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--out-dir", default=None)
    known, rest = pre.parse_known_args(argv)
    command = next((t for t in rest if not t.startswith("-")), "unknown")
    out = _out_dir(known.out_dir)
    os.makedirs(out, exist_ok=True)
    _write_json(os.path.join(out, f"run_{command}.json"),
                {"command": command, "parameters": {"argv": list(argv)}, "outputs": [],
                 "timings": {}, "versions": {"artifact": __version__},
                 "error": "invalid command-line flags", "exit_code": code})


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_FAIL
        if code != EXIT_OK:
            _record_parse_failure(argv, code)
        return code
    out = _out_dir(args.out_dir)
    os.makedirs(out, exist_ok=True)
    record = {"command": args.command, "parameters": _params(args), "outputs": [],
              "timings": {}, "versions": {"artifact": __version__}, "error": None}
    t0 = time.perf_counter()
    try:
        code, outputs, result = args.func(args, out)
        record["outputs"] = outputs
        record["result"] = result
    except (argparse.ArgumentTypeError, InvalidArgumentError, BracketingError) as exc:
        code = EXIT_FAIL
        record["error"] = repr(exc)
        print(f"error: {exc}", file=sys.stderr)
    except (PainleveError, ArithmeticError, RuntimeError) as exc:
        code = EXIT_NUMERIC
        record["error"] = repr(exc)
        print(f"numerical failure: {exc}", file=sys.stderr)
    except ValueError as exc:
        code = EXIT_FAIL
        record["error"] = repr(exc)
        print(f"error: {exc}", file=sys.stderr)
    record["timings"]["total_seconds"] = time.perf_counter() - t0
    record["exit_code"] = code
    run_path = os.path.join(out, f"run_{args.command}.json")
    _write_json(run_path, record)
    return code


if __name__ == "__main__":
    sys.exit(main())
