"""Command-line front end.

    kappaosc verify                       exact identity suite
    kappaosc simulate --kappa -0.5,0.5    trajectories + conservation report
    kappaosc spectrum --kappa 0 --n-max 3 closed-form levels on every branch
    kappaosc oracle --kappa 0.1 --mu 0,1  numerical eigenvalues vs closed forms
    kappaosc wavefunction --kappa 0.1     sampled Psi + norm report

Exit codes: 0 success, 1 verification/oracle failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import report
from .model import CartState, DomainError, in_domain

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


# -- argument types --------------------------------------------------------------

def float_list(text: str) -> List[float]:
    items = [s for s in (p.strip() for p in str(text).split(",")) if s]
    if not items:
        raise argparse.ArgumentTypeError("sweep list must not be empty")
    try:
        vals = [float(s) for s in items]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError("values must be finite")
    return vals


def int_list(text: str) -> List[int]:
    vals = float_list(text)
    if any(v != int(v) or v < 0 for v in vals):
        raise argparse.ArgumentTypeError("expected non-negative integers")
    return [int(v) for v in vals]


def state4(text: str) -> List[float]:
    vals = float_list(text)
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("state needs four numbers x,y,vx,vy")
    return vals


def boolean(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


# -- parser ------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, formats=("json", "csv")):
    p.add_argument("--config", help="plain key=value file; flags given on the command line win")
    p.add_argument("--out", help="report path (default: stdout)")
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--seed", type=int, default=0, help="recorded in the report; drives --random-state")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kappaosc", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the exact identity suite")
    _common(p, ("json",))
    p.add_argument("--timings", action="store_true", help="include wall-clock times (not reproducible)")

    p = sub.add_parser("simulate", help="integrate trajectories and report conservation")
    _common(p)
    p.add_argument("--kappa", type=float_list, default=[0.0])
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--state", type=state4, default=[0.5, 0.2, 0.1, 0.6], help="x,y,vx,vy")
    p.add_argument("--random-state", type=boolean, nargs="?", const=True, default=False)
    p.add_argument("--t-end", type=float, default=100.0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--sample-dt", type=float, default=0.05)
    p.add_argument("--csv-dir", help="write one trajectory CSV per kappa here")

    p = sub.add_parser("spectrum", help="closed-form levels on every sign branch")
    _common(p)
    p.add_argument("--kappa", type=float_list, default=[0.0])
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--mu", type=int_list, help="restrict to these mu (default: all with mu <= n-max)")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--adjudicate", type=boolean, nargs="?", const=True, default=True,
                   help="run the numerical oracle to pick the resolved branch")

    p = sub.add_parser("oracle", help="numerical eigenvalues against the closed forms")
    _common(p)
    p.add_argument("--kappa", type=float_list, default=[-0.1, 0.1])
    p.add_argument("--mu", type=int_list, default=[0, 1, 2])
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--M", type=int, default=None, help="cells on the coarse grid")
    p.add_argument("--tol", type=float, default=1e-4, help="agreement tolerance for the branch match")

    p = sub.add_parser("wavefunction", help="sample a normalized eigenfunction")
    _common(p)
    p.add_argument("--kappa", type=float, default=0.1)
    p.add_argument("--nr", type=int, default=0)
    p.add_argument("--mu", type=int, default=0)
    p.add_argument("--sign", type=int, choices=(1, -1), default=1)
    p.add_argument("--branch", choices=("inverted", "mirror", "conjugate"), default="conjugate")
    p.add_argument("--r-points", type=int, default=50)
    p.add_argument("--phi-points", type=int, default=8)
    p.add_argument("--csv", help="write r,phi,re,im samples here")
    return parser


def _subparsers(parser: argparse.ArgumentParser) -> Dict[str, argparse.ArgumentParser]:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return dict(action.choices)
    return {}


def _apply_config(parser, sub: argparse.ArgumentParser, cfg: Dict[str, str]):
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in cfg.items():
        act = actions.get(key)
        if act is None or key in ("config", "help"):
            parser.error(f"unknown config key {key!r}")
        conv = act.type
        if isinstance(act, argparse._StoreTrueAction):
            conv = boolean
        try:
            value = conv(raw) if conv else raw
        except (argparse.ArgumentTypeError, ValueError) as exc:
            parser.error(f"config key {key!r}: {exc}")
        if act.choices is not None and value not in act.choices:
            parser.error(f"config key {key!r}: {value!r} not in {list(act.choices)}")
        defaults[key] = value
    sub.set_defaults(**defaults)


def _validate(parser, args):
    cmd = args.command
    if cmd == "simulate":
        if not (1e-13 <= args.tol <= 1e-6):
            parser.error("--tol must lie in [1e-13, 1e-6]")
        if not (math.isfinite(args.t_end) and args.t_end != 0):
            parser.error("--t-end must be finite and non-zero")
        if not args.sample_dt > 0:
            parser.error("--sample-dt must be positive")
        if not args.alpha >= 0:
            parser.error("--alpha must be non-negative")
    elif cmd == "spectrum":
        if args.n_max < 0:
            parser.error("--n-max must be non-negative")
        for name in ("alpha", "m", "hbar"):
            if not getattr(args, name) > 0:
                parser.error(f"--{name} must be positive")
    elif cmd == "oracle":
        if args.levels < 1:
            parser.error("--levels must be at least 1")
        if args.M is not None and not (50 * args.levels <= args.M <= 2_000_000):
            parser.error("--M must lie in [50 * levels, 2e6]")
    elif cmd == "wavefunction":
        if args.nr < 0 or args.mu < 0:
            parser.error("--nr and --mu must be non-negative")
        if args.r_points < 2 or args.phi_points < 1:
            parser.error("need at least 2 radial and 1 angular sample")


# -- output -------------------------------------------------------------------------

def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _args_dict(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("handler", "config", "out")}


def _error(kind: str, message: str, code: int, **extra) -> int:
    sys.stderr.write(report.dumps({"error": kind, "message": message, **extra}))
    return code


# -- subcommands ------------------------------------------------------------------------

def cmd_verify(args, cfg) -> int:
    from .sym import suite_report

    rep = suite_report(timings=args.timings)
    doc = {"header": report.header("verify", _args_dict(args), cfg, args.seed),
           "branches": report.branch_status(),
           "summary": {"count": rep["count"], "all_zero": rep["all_zero"],
                       "status": {i["name"]: i["status"] for i in rep["identities"]}},
           **rep}
    _emit(args, report.dumps(doc))
    return EXIT_OK if rep["all_zero"] else EXIT_FAIL


def _random_state(rng: np.random.Generator, kappa: float) -> List[float]:
    reach = 0.5 if kappa <= 0 else 0.5 / math.sqrt(max(kappa, 1.0))
    r = reach * math.sqrt(rng.uniform(0.05, 1.0))
    th = rng.uniform(0, 2 * math.pi)
    v = rng.normal(0.0, 0.5, size=2)
    return [r * math.cos(th), r * math.sin(th), float(v[0]), float(v[1])]


def cmd_simulate(args, cfg) -> int:
    from .classical import (classify_motion, conservation_report, integrate,
                            write_trajectory_csv)

    rng = np.random.default_rng(args.seed)
    runs, rows, failed = [], [], False
    if args.csv_dir:
        os.makedirs(args.csv_dir, exist_ok=True)
    for i, kappa in enumerate(args.kappa):
        coords = _random_state(rng, kappa) if args.random_state else list(args.state)
        init = CartState(*coords)
        if not in_domain(init, kappa, 1e-10):
            return _error("domain", f"initial state outside 1 - kappa r^2 > 0 at kappa={kappa}",
                          EXIT_USAGE, kappa=kappa, state=coords)
        try:
            traj = integrate(init, kappa, args.alpha, args.t_end, tol=args.tol, sample_dt=args.sample_dt)
        except DomainError as exc:
            return _error("domain", str(exc), EXIT_USAGE, kappa=kappa, state=coords)
        cons = conservation_report(traj)
        run = {"kappa": kappa, "initial_state": coords, "status": traj.status, "message": traj.message,
               "steps": traj.steps, "rejected": traj.rejected, "samples": len(traj),
               "last_valid_time": traj.last_valid_time, "conservation": cons.as_dict(),
               "motion": classify_motion(traj) if len(traj) > 8 else None}
        if args.csv_dir:
            path = os.path.join(args.csv_dir, f"trajectory_{i:03d}.csv")
            write_trajectory_csv(traj, path)
            run["csv"] = path
        failed |= traj.status != "ok"
        runs.append(run)
        for name, d in cons.quantities.items():
            rows.append((kappa, name, d.initial, d.max_abs, d.max_rel, traj.status))
    if args.format == "csv":
        _emit(args, report.csv_text(("kappa", "quantity", "initial", "max_abs", "max_rel", "status"), rows))
    else:
        doc = {"header": report.header("simulate", _args_dict(args), cfg, args.seed),
               "branches": report.branch_status(),
               "conventions": {"mass": 1.0, "hamiltonian": "H = T + alpha^2 r^2 / (2 (1 - k r^2))",
                               "relative_drift": "max |Q(t) - Q(0)| / |Q(0)|"},
               "runs": runs}
        _emit(args, report.dumps(doc))
    return EXIT_FAIL if failed else EXIT_OK


def _adjudicate(kappas, mus, levels, M=None):
    from .quantum import resolve_branch, sl_eigensolve
    from .quantum.oracle import default_grid

    results = []
    for k in kappas:
        for mu in mus:
            grid = default_grid(mu, k, levels, M) if M else None
            results.append(sl_eigensolve(mu, k, levels, grid))
    return results, resolve_branch


def cmd_spectrum(args, cfg) -> int:
    from .model import PhysConstants
    from .quantum import BRANCHES, spectrum_lines

    const = PhysConstants(args.m, args.alpha, args.hbar)
    mus = args.mu if args.mu is not None else list(range(args.n_max + 1))
    mus = [mu for mu in mus if mu <= args.n_max]
    if not mus:
        return _error("usage", "no mu value satisfies mu <= n-max", EXIT_USAGE)
    blocks = []
    for k in args.kappa:
        for mu in mus:
            for b in BRANCHES:
                lines = spectrum_lines(k, mu, args.n_max, b, const)
                blocks.append({"kappa": k, "mu": mu, "branch": b, "lines": [ln.as_dict() for ln in lines]})
    status = report.branch_status()
    code = EXIT_OK
    if args.adjudicate:
        levels = max(1, args.n_max // 2 + 1)
        try:
            results, resolve = _adjudicate(args.kappa, [mus[0]], levels)
        except ArithmeticError as exc:
            return _error("oracle", str(exc), EXIT_FAIL)
        res = resolve(results)
        status = report.branch_status(res.branch, f"oracle, mu={mus[0]}, {levels} level(s) per kappa")
        status["max_delta"] = res.max_delta
        if res.branch is None or not all(r.converged for r in results):
            code = EXIT_FAIL
        for blk in blocks:
            blk["resolved"] = blk["branch"] == res.branch
    if args.format == "csv":
        rows = [(blk["kappa"], blk["mu"], blk["branch"], ln["N_r"], ln["n"], ln["E_scaled"],
                 ln["E_physical"], ln["source"]) for blk in blocks for ln in blk["lines"]]
        _emit(args, report.csv_text(("kappa", "mu", "branch", "N_r", "n", "E_scaled", "E_physical",
                                     "source"), rows))
    else:
        doc = {"header": report.header("spectrum", _args_dict(args), cfg, args.seed),
               "branches": status, "spectra": blocks}
        _emit(args, report.dumps(doc))
    return code


def cmd_oracle(args, cfg) -> int:
    from .quantum import BRANCHES, QuantumNumbers, closed_form_energy

    try:
        results, resolve = _adjudicate(args.kappa, args.mu, args.levels, args.M)
    except ArithmeticError as exc:
        return _error("oracle", str(exc), EXIT_FAIL)
    res = resolve(results, args.tol)
    table = []
    for r in results:
        for N, e in enumerate(r.eigenvalues):
            qn = QuantumNumbers(N, r.mu)
            row = {"kappa": r.kappa, "mu": r.mu, "N_r": N, "n": qn.n, "oracle": e,
                   "grid_error": r.grid_error[N], "boundary_shift": r.boundary_shift[N]}
            for b in BRANCHES:
                cf = float(closed_form_energy(qn, r.kappa, b))
                row[b] = cf
                row[f"delta_{b}"] = abs(e - cf)
            table.append(row)
    ok = res.branch is not None and all(r.converged for r in results)
    if args.format == "csv":
        cols = list(table[0].keys())
        _emit(args, report.csv_text(cols, ([row[c] for c in cols] for row in table)))
    else:
        doc = {"header": report.header("oracle", _args_dict(args), cfg, args.seed),
               "branches": {**report.branch_status(res.branch, "oracle, this run"),
                            "max_delta": res.max_delta, "tol": res.tol},
               "converged": all(r.converged for r in results),
               "solves": [{k: v for k, v in r.as_dict().items() if k != "coarse"} for r in results],
               "table": table}
        _emit(args, report.dumps(doc))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_wavefunction(args, cfg) -> int:
    from .quantum import (NonNormalizableError, QuantumNumbers,
                          closed_form_energy, eval_wavefunction,
                          normalization_constant, quadrature_norm,
                          schrodinger_residual)

    qn = QuantumNumbers(args.nr, args.mu, args.sign)
    k = args.kappa
    energy = float(closed_form_energy(qn, k, args.branch))
    info = {"N_r": qn.N_r, "mu": qn.mu, "sign": qn.sign, "n": qn.n, "kappa": k,
            "branch": args.branch, "E_scaled": energy}
    try:
        info["residual"] = schrodinger_residual(qn, k, branch=args.branch)
    except (ArithmeticError, ValueError) as exc:
        return _error("wavefunction", str(exc), EXIT_FAIL, **info)
    try:
        C = normalization_constant(qn, k, args.branch)
        norm = quadrature_norm(qn, qn, k, args.branch)
    except NonNormalizableError as exc:
        info.update(normalizable=False, reason=str(exc))
        sys.stderr.write(report.dumps({"error": "non_normalizable", **info}))
        return EXIT_FAIL
    info.update(normalizable=True, normalization_constant=C, norm=norm.real)
    if k > 0:
        r_hi = (1 - 1e-3) / math.sqrt(k)
    else:
        r_hi = 3.0 * math.sqrt(qn.n + 1) + 3.0
    r = np.linspace(0.0, r_hi, args.r_points)
    phi = np.linspace(0.0, 2 * math.pi, args.phi_points, endpoint=False)
    rr, pp = np.meshgrid(r, phi, indexing="ij")
    psi = eval_wavefunction(qn, k, rr.ravel(), pp.ravel(), branch=args.branch)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(report.csv_text(("r", "phi", "re", "im"),
                                     zip(rr.ravel(), pp.ravel(), psi.real, psi.imag)))
        info["csv"] = args.csv
    doc = {"header": report.header("wavefunction", _args_dict(args), cfg, args.seed),
           "branches": report.branch_status(), "state": info}
    if args.format == "csv":
        _emit(args, report.csv_text(tuple(info.keys()), [tuple(info.values())]))
    else:
        _emit(args, report.dumps(doc))
    return EXIT_OK


HANDLERS: Dict[str, Callable] = {
    "verify": cmd_verify, "simulate": cmd_simulate, "spectrum": cmd_spectrum,
    "oracle": cmd_oracle, "wavefunction": cmd_wavefunction,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    cfg: Dict[str, str] = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = report.parse_config(fh.read())
        except (OSError, ValueError) as exc:
            parser.error(f"--config: {exc}")
        _apply_config(parser, _subparsers(parser)[args.command], cfg)
        args = parser.parse_args(argv)
    _validate(parser, args)
    return HANDLERS[args.command](args, cfg)


if __name__ == "__main__":
    sys.exit(main())
