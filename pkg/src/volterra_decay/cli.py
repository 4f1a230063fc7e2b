"""Command-line front end: ``volterra-decay {certify,solve,verify} FILE``.

Exit codes: 0 success, 1 input error, 2 certificate failed,
3 solver non-convergence, divergence, or bound violation.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time

import numpy as np

from .certify import Certificate, certify
from .comparison import (
    check_initial_condition,
    check_mu_condition,
    compare_to_envelope,
    integrate_majorant,
    spec_from_problem,
)
from .problem_file import ProblemFile, ProblemFileError, load_problem, to_dict
from .solver import DivergenceError, PicardResult, Trajectory, solve_ode, solve_picard, verify_bound

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CERT = 2
EXIT_SOLVER = 3


class SolverFailure(Exception):
    pass


def _clean(obj):
    # JSON has no inf/nan; spell them as strings
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def render_report(report: dict) -> str:
    return json.dumps(_clean(report), indent=2) + "\n"


def certificate_dict(cert: Certificate) -> dict:
    return {
        "overall": cert.overall,
        "reason": cert.reason,
        "R": cert.R,
        "p": cert.p,
        "q": cert.q,
        "failed": cert.failed,
        "ledger": [c.as_dict() for c in cert.ledger],
        "literal": dict(cert.literal),
    }


def _picard_dict(res: PicardResult) -> dict:
    return {
        "iterations": res.iterations,
        "final_delta": res.final_delta,
        "converged": res.converged,
        "deltas": list(res.deltas),
    }


def run_solvers(pf: ProblemFile, method: str, timings: dict) -> dict[str, object]:
    """Returns {'picard': PicardResult, 'ode': Trajectory} for the requested methods."""
    out = {}
    try:
        if method in ("picard", "both"):
            t0 = time.perf_counter()
            res = solve_picard(pf.problem, pf.grid, pf.options.tol, pf.options.max_iter)
            timings["picard_s"] = time.perf_counter() - t0
            out["picard"] = res
            if not res.converged:
                raise SolverFailure(
                    f"Picard iteration did not converge in {res.iterations} iterations "
                    f"(final delta {res.final_delta:.3e} > tol {pf.options.tol:.3e})"
                )
        if method in ("ode", "both"):
            t0 = time.perf_counter()
            out["ode"] = solve_ode(pf.problem, pf.grid)
            timings["ode_s"] = time.perf_counter() - t0
    except DivergenceError as exc:
        raise SolverFailure(str(exc)) from None
    return out


def _trajectories(results: dict) -> dict[str, Trajectory]:
    return {
        k: (v.trajectory if isinstance(v, PicardResult) else v) for k, v in results.items()
    }


def write_csv(path, traj: Trajectory, cert: Certificate | None):
    header = ["t", "re_u", "im_u", "abs_u"]
    env = None
    if cert is not None and cert.overall:
        header.append("envelope")
        env = cert.envelope(traj.t)
    values = np.asarray(traj.values, dtype=complex)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for k, t in enumerate(traj.t):
            z = complex(values[k])
            row = [repr(float(t)), repr(z.real), repr(z.imag), repr(abs(z))]
            if env is not None:
                row.append(repr(float(env[k])))
            w.writerow(row)


def cmd_certify(pf: ProblemFile) -> tuple[dict, int]:
    cert = certify(pf.problem, pf.options.margin)
    report = {"command": "certify", "problem": to_dict(pf), "certificate": certificate_dict(cert)}
    return report, EXIT_OK if cert.overall else EXIT_CERT


def cmd_solve(pf: ProblemFile, method: str = "both", out_csv=None, timings=None) -> tuple[dict, int]:
    timings = {} if timings is None else timings
    cert = certify(pf.problem, pf.options.margin)
    report = {
        "command": "solve",
        "method": method,
        "problem": to_dict(pf),
        "certificate": certificate_dict(cert),
    }
    try:
        results = run_solvers(pf, method, timings)
    except SolverFailure as exc:
        report["error"] = str(exc)
        return report, EXIT_SOLVER
    trajs = _trajectories(results)
    report["solvers"] = {}
    if "picard" in results:
        report["solvers"]["picard"] = _picard_dict(results["picard"])
    if "ode" in results:
        report["solvers"]["ode"] = {"steps": pf.grid.n}
    if len(trajs) == 2:
        report["cross_solver_sup_distance"] = trajs["picard"].sup_distance(trajs["ode"])
    if cert.overall:
        report["bound"] = {
            name: verify_bound(tr, cert, pf.options.slack).as_dict() for name, tr in trajs.items()
        }
    if out_csv is not None:
        primary = trajs.get("picard", trajs.get("ode"))
        write_csv(out_csv, primary, cert)
    return report, EXIT_OK


def cmd_verify(pf: ProblemFile, timings=None) -> tuple[dict, int]:
    timings = {} if timings is None else timings
    cert = certify(pf.problem, pf.options.margin)
    report = {"command": "verify", "problem": to_dict(pf), "certificate": certificate_dict(cert)}
    if not cert.overall:
        report["error"] = "certificate failed; nothing solved"
        return report, EXIT_CERT
    try:
        results = run_solvers(pf, "both", timings)
    except SolverFailure as exc:
        report["error"] = str(exc)
        return report, EXIT_SOLVER
    trajs = _trajectories(results)
    slack = pf.options.slack
    bounds = {name: verify_bound(tr, cert, slack) for name, tr in trajs.items()}

    spec = spec_from_problem(pf.problem, cert)
    mu_cond = check_mu_condition(spec, pf.grid)
    mu = spec.mu(pf.grid.nodes)
    # equality majorants: from 1/mu(0) it must stay under the envelope,
    # from g(0) it must stay over |u|
    from_envelope = integrate_majorant(spec, 1.0 / spec.mu(0.0), pf.grid).values
    from_g0 = integrate_majorant(spec, spec.g0, pf.grid).values
    report["solvers"] = {"picard": _picard_dict(results["picard"]), "ode": {"steps": pf.grid.n}}
    report["cross_solver_sup_distance"] = trajs["picard"].sup_distance(trajs["ode"])
    report["bound"] = {name: b.as_dict() for name, b in bounds.items()}
    report["comparison"] = {
        "mu_condition": mu_cond._asdict(),
        "initial_condition": check_initial_condition(spec),
        "majorant_max_w_times_mu": float(np.max(from_envelope * mu)),
        "majorant_minus_modulus_min": {
            name: float(np.min(from_g0 - tr.modulus)) for name, tr in trajs.items()
        },
        "envelope": {
            name: compare_to_envelope(tr.modulus, spec, pf.grid, slack).as_dict()
            for name, tr in trajs.items()
        },
    }
    ok = all(b.holds for b in bounds.values())
    report["verdict"] = "bound holds" if ok else "bound violated"
    return report, EXIT_OK if ok else EXIT_SOLVER


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="volterra-decay",
        description="Certify, solve and verify Volterra-Hammerstein equations with exponential kernel.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="YAML problem file")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--margin", type=float, help="decay-rate safety margin in (0, 1)")
    common.add_argument("--slack", type=float, help="tolerance on the envelope ratio")
    common.add_argument("--grid-T", dest="grid_T", type=float, help="time horizon")
    common.add_argument("--grid-n", dest="grid_n", type=int, help="number of steps")
    common.add_argument("--timing", action="store_true", help="append wall-clock runtimes to the report")

    sub.add_parser("certify", parents=[common], help="check the decay certificate")
    solve = sub.add_parser("solve", parents=[common], help="solve numerically")
    solve.add_argument("--method", choices=["picard", "ode", "both"], default="both")
    solve.add_argument("--out-csv", dest="out_csv", help="write the trajectory as CSV")
    sub.add_parser("verify", parents=[common], help="certify, solve and check the bound")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        pf = load_problem(args.input)
        pf = pf.with_overrides(T=args.grid_T, n=args.grid_n, margin=args.margin, slack=args.slack)
        if not 0.0 < pf.options.margin < 1.0:
            raise ProblemFileError(f"expected a value in (0, 1), got {pf.options.margin!r}", "--margin")
        if pf.options.slack < 0:
            raise ProblemFileError("expected a non-negative number", "--slack")
    except ProblemFileError as exc:
        print(f"error: {args.input}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    timings: dict = {}
    if args.command == "certify":
        report, code = cmd_certify(pf)
    elif args.command == "solve":
        try:
            report, code = cmd_solve(pf, args.method, args.out_csv, timings)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    else:
        report, code = cmd_verify(pf, timings)
    if args.timing:
        report["runtime"] = timings

    text = render_report(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if "error" in report:
        print(f"error: {report['error']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
