"""Command-line frontend.

Exit codes: 0 center (or successful verification), 1 focus (or failed
verification), 2 degenerate or non-elliptic equilibrium, 64 usage
error, 65 numeric or domain error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .classifier import CenterCase, Verdict, classification_record, classify
from .conserved import IntegralCase, build_integral, format_integral, invariance_residual
from .dynamics import (
    STEP_BUDGET_DEFAULT,
    bautin_scenario,
    detect_limit_cycles,
    format_cycle_report,
    format_return_record,
    format_trajectory,
    integrate,
    poincare_return,
)
from .errors import LotkaError
from .focal import focal_record
from .model import CanonicalParams, RawLotkaParams, canonicalize
from .symmetry import r1_residual, r2_residual

EXIT_CENTER = 0
EXIT_FOCUS = 1
EXIT_DEGENERATE = 2
EXIT_USAGE = 64
EXIT_NUMERIC = 65

_CANONICAL_FLAGS = ("a1", "b1", "a3", "b3", "K")
_RAW_FLAGS = (
    "k1",
    "k2",
    "k3",
    "k4",
    "alpha1",
    "beta1",
    "alpha2",
    "beta2",
    "alpha3",
    "beta3",
)

_CASE_BY_NAME = {
    "i": CenterCase.I,
    "ii": CenterCase.II,
    "iii": CenterCase.III,
    "iv": CenterCase.IV,
    "r1": CenterCase.R1,
    "r2": CenterCase.R2,
    "r1r2": IntegralCase.R1_CAP_R2,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage failures exit with code 64."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group(
        "system parameters",
        "either the canonical exponents --a1 --b1 --a3 --b3 --K, or the raw "
        "rates --k1..--k4 with exponents --alpha1..--beta3",
    )
    for name in _CANONICAL_FLAGS:
        g.add_argument(f"--{name}", type=float, default=None, metavar="X")
    for name in _RAW_FLAGS:
        g.add_argument(f"--{name}", type=float, default=None, metavar="X")


def _params(args: argparse.Namespace) -> CanonicalParams:
    canon = [getattr(args, n) for n in _CANONICAL_FLAGS]
    raw = [getattr(args, n) for n in _RAW_FLAGS]
    have_canon = [v is not None for v in canon]
    have_raw = [v is not None for v in raw]
    if any(have_canon) and any(have_raw):
        raise _UsageError("give either canonical exponents or raw rates, not both")
    if all(have_canon):
        return CanonicalParams(*canon)
    if all(have_raw):
        c, _ = canonicalize(RawLotkaParams(*raw))
        return c
    if any(have_canon):
        missing = ", ".join(
            f"--{n}" for n, h in zip(_CANONICAL_FLAGS, have_canon) if not h
        )
        raise _UsageError(f"missing canonical flags: {missing}")
    if any(have_raw):
        missing = ", ".join(f"--{n}" for n, h in zip(_RAW_FLAGS, have_raw) if not h)
        raise _UsageError(f"missing raw-rate flags: {missing}")
    raise _UsageError(
        "system parameters required: --a1 --b1 --a3 --b3 --K (or the raw form)"
    )


def _sample_points(n: int, seed: int) -> list[tuple[float, float]]:
    rng = np.random.default_rng(seed)
    logs = rng.uniform(math.log(0.25), math.log(4.0), size=(n, 2))
    return [(float(math.exp(u)), float(math.exp(v))) for u, v in logs]


def _cmd_classify(args: argparse.Namespace) -> int:
    c = _params(args)
    result = classify(
        c,
        l1_zero_tol=args.l1_tol,
        l2_zero_tol=args.l2_tol,
        match_tol=args.match_tol,
    )
    print(classification_record(result))
    if result.verdict is Verdict.CENTER:
        return EXIT_CENTER
    if result.verdict in (
        Verdict.FOCUS_STABLE,
        Verdict.FOCUS_UNSTABLE,
        Verdict.WEAK_FOCUS_ORDER2_PLUS,
    ):
        return EXIT_FOCUS
    return EXIT_DEGENERATE


def _sweep_node(a1: float, b1: float, a3: float, K: float, match_tol: float) -> dict:
    b3 = a1 / K
    rec: dict = {"a1": a1, "b1": b1, "a3": a3, "b3": b3}
    try:
        result = classify(CanonicalParams(a1, b1, a3, b3, K), match_tol=match_tol)
    except (LotkaError, ValueError) as exc:
        rec.update(verdict="Error", cases=[], L1=None, L2=None, error=str(exc))
        return rec
    fv = result.focal
    l1 = None if fv is None or not math.isfinite(fv.L1) else fv.L1
    l2 = None if fv is None or fv.L2 is None or not math.isfinite(fv.L2) else fv.L2
    rec.update(
        verdict=result.verdict.value,
        cases=sorted(case.value for case in result.cases),
        L1=l1,
        L2=l2,
    )
    return rec


def _cmd_sweep(args: argparse.Namespace) -> int:
    if args.K <= 0.0 or not math.isfinite(args.K):
        raise _UsageError(f"--K must be a positive finite number, got {args.K}")
    grids = []
    for name in ("a1", "b1", "a3"):
        lo, hi = getattr(args, f"{name}_range")
        steps = getattr(args, f"{name}_steps")
        if steps < 2:
            raise _UsageError(f"--{name}-steps must be at least 2, got {steps}")
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise _UsageError(f"--{name}-range must be a finite increasing pair")
        grids.append([float(v) for v in np.linspace(lo, hi, steps)])

    nodes = [
        (a1, b1, a3, args.K, args.match_tol)
        for a1 in grids[0]
        for b1 in grids[1]
        for a3 in grids[2]
    ]
    try:
        workers = max(1, int(os.environ.get("LOTKA_THREADS", "4")))
    except ValueError:
        workers = 4

    out = sys.stdout if args.out == "-" else open(args.out, "w", encoding="utf-8")
    n = 0
    try:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for rec in pool.map(lambda node: _sweep_node(*node), nodes):
                out.write(json.dumps(rec, allow_nan=False) + "\n")
                n += 1
    finally:
        if out is not sys.stdout:
            out.close()
    print(f"{n} records", file=sys.stderr)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    c = _params(args)
    tr = integrate(
        c,
        (args.x0, args.y0),
        args.t_max,
        args.rel_tol,
        step_budget=args.max_steps,
    )
    text = format_trajectory(tr)
    if args.out == "-":
        print(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(
        f"termination = {tr.termination.value}  accepted = {tr.n_accepted}  "
        f"rejected = {tr.n_rejected}",
        file=sys.stderr,
    )
    return 0


def _cmd_poincare(args: argparse.Namespace) -> int:
    c = _params(args)
    rec = poincare_return(c, args.x0, args.rel_tol)
    print(format_return_record(rec))
    return 0


def _cmd_cycles(args: argparse.Namespace) -> int:
    c = _params(args)
    report = detect_limit_cycles(
        c,
        args.r_min,
        args.r_max,
        args.n_scan,
        rel_tol=args.rel_tol,
        refine_rel_tol=args.refine_tol,
    )
    print(format_cycle_report(report))
    return 0


def _cmd_verify_integral(args: argparse.Namespace) -> int:
    c = _params(args)
    fi = build_integral(_CASE_BY_NAME[args.case], c)
    residual = invariance_residual(fi, c, _sample_points(args.points, args.seed))
    print(format_integral(fi))
    print(f"max scaled gradient residual over {args.points} points = {residual:.3e}")
    ok = residual <= args.tol
    print("PASS" if ok else f"FAIL (tolerance {args.tol:g})")
    return 0 if ok else 1


def _cmd_verify_reversible(args: argparse.Namespace) -> int:
    c = _params(args)
    residual_fn = r1_residual if args.family == "r1" else r2_residual
    residual = residual_fn(c, _sample_points(args.points, args.seed))
    print(f"max scaled {args.family} residual over {args.points} points = {residual:.3e}")
    ok = residual <= args.tol
    print("PASS" if ok else f"FAIL (tolerance {args.tol:g})")
    return 0 if ok else 1


def _cmd_bautin(args: argparse.Namespace) -> int:
    result = bautin_scenario(
        args.b1,
        args.a3,
        args.dK,
        args.dA1,
        r_min=args.r_min,
        r_max=args.r_max,
        n_scan=args.n_scan,
        rel_tol=args.rel_tol,
        refine_rel_tol=args.refine_tol,
    )
    print("# base (trace = 0, first focal value = 0)")
    print(focal_record(result.base_focal))
    print("# stage 1: K perturbed, trace still 0")
    print(focal_record(result.stage1_focal))
    print(format_cycle_report(result.stage1_report))
    print(f"# stage 2: a1 = K - eps, eps = {result.stage2_eps!r}")
    print(format_cycle_report(result.stage2_report))
    return 0


def _auto_or_float(text: str):
    if text.strip().lower() == "auto":
        return None
    try:
        return float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"expected a number or 'auto', got {text!r}"
        ) from exc


def build_parser() -> _Parser:
    parser = _Parser(
        prog="lotkacenter",
        description="Center-focus analysis of planar power-law predator-prey systems.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("classify", help="verdict, matched center families, focal values")
    _add_param_flags(p)
    p.add_argument("--l1-tol", type=float, default=1e-10)
    p.add_argument("--l2-tol", type=float, default=1e-10)
    p.add_argument("--match-tol", type=float, default=1e-9)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser(
        "sweep",
        help="classify a 3-D grid over (a1, b1, a3) at fixed K with b3 = a1/K",
    )
    p.add_argument("--K", type=float, required=True)
    p.add_argument("--a1-range", type=float, nargs=2, default=(-3.0, 3.0), metavar=("LO", "HI"))
    p.add_argument("--b1-range", type=float, nargs=2, default=(-3.0, 3.0), metavar=("LO", "HI"))
    p.add_argument("--a3-range", type=float, nargs=2, default=(-3.0, 3.0), metavar=("LO", "HI"))
    p.add_argument("--a1-steps", type=int, default=50)
    p.add_argument("--b1-steps", type=int, default=50)
    p.add_argument("--a3-steps", type=int, default=50)
    p.add_argument("--match-tol", type=float, default=1e-9)
    p.add_argument("--out", default="-", help="output path for JSON lines, - for stdout")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("simulate", help="integrate one trajectory, emit t, x, y columns")
    _add_param_flags(p)
    p.add_argument("--x0", type=float, required=True)
    p.add_argument("--y0", type=float, required=True)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--rel-tol", type=float, default=1e-9)
    p.add_argument("--max-steps", type=int, default=STEP_BUDGET_DEFAULT)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("poincare", help="one return-map evaluation on the section")
    _add_param_flags(p)
    p.add_argument("--x0", type=float, required=True, help="in-section coordinate, > 1")
    p.add_argument("--rel-tol", type=float, default=1e-9)
    p.set_defaults(func=_cmd_poincare)

    p = sub.add_parser("cycles", help="scan for limit cycles by displacement sign change")
    _add_param_flags(p)
    p.add_argument("--r-min", type=float, default=0.02)
    p.add_argument("--r-max", type=float, default=1.5)
    p.add_argument("--n-scan", type=int, default=30)
    p.add_argument("--rel-tol", type=float, default=1e-8)
    p.add_argument("--refine-tol", type=float, default=1e-10)
    p.set_defaults(func=_cmd_cycles)

    p = sub.add_parser(
        "verify-integral", help="check a first integral's gradient residual"
    )
    _add_param_flags(p)
    p.add_argument("--case", required=True, choices=sorted(_CASE_BY_NAME))
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=_cmd_verify_integral)

    p = sub.add_parser(
        "verify-reversible", help="check a reflection-reversibility identity"
    )
    _add_param_flags(p)
    p.add_argument("--family", required=True, choices=["r1", "r2"])
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=_cmd_verify_reversible)

    p = sub.add_parser(
        "bautin", help="two-stage construction of coexisting limit cycles"
    )
    p.add_argument("--b1", type=float, required=True)
    p.add_argument("--a3", type=float, required=True)
    p.add_argument("--dK", type=float, required=True)
    p.add_argument("--dA1", type=_auto_or_float, default=None)
    p.add_argument("--r-min", type=float, default=0.02)
    p.add_argument("--r-max", type=float, default=1.5)
    p.add_argument("--n-scan", type=int, default=30)
    p.add_argument("--rel-tol", type=float, default=1e-8)
    p.add_argument("--refine-tol", type=float, default=1e-10)
    p.set_defaults(func=_cmd_bautin)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LotkaError, ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
