"""Command-line front end: verify, print, apply, errata."""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .exactalg import Signature
from .opfactory import build_operator_set, confirm_table, latex_export
from .powfun import PowerFunc, func_apply_weyl
from .verify import DEFAULT_SIGNATURES, SUITES, TestConfig, build_report, run_suites
from .weyl import apply_to_poly, op_to_json, render_text

PRINT_OPS = ("pipeline", "explicit", "sing", "reg", "F", "Fclosed", "Fclosed_corrected")


def _signature(text: str) -> Signature:
    try:
        sig = Signature.parse(text)
        sig.require_standard()
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad signature {text!r}: {exc}") from None
    return sig


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quadricops", description="Exact checks for invariant bi-differential operators on real quadrics.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--signature", type=_signature, action="append", help="p,q (repeatable; default: all standard test signatures)")
    v.add_argument("--suite", choices=("all",) + SUITES, default="all")
    v.add_argument("--trials", type=int, default=50)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--oracle-trials", type=int, default=20)
    v.add_argument("--report", type=Path)
    v.add_argument("--no-timing", action="store_true", help="omit wall times so reports are byte-identical across runs")

    p = sub.add_parser("print", help="print a named operator")
    p.add_argument("--op", choices=PRINT_OPS, required=True)
    p.add_argument("--signature", type=_signature, required=True)
    p.add_argument("--format", choices=("latex", "json", "text"), default="text")

    a = sub.add_parser("apply", help="apply an operator to a function at fixed lambda, mu")
    a.add_argument("--op", required=True)
    a.add_argument("--lambda", dest="lam", type=_rational, required=True)
    a.add_argument("--mu", type=_rational, required=True)
    a.add_argument("--function", type=Path, required=True)
    a.add_argument("--signature", type=_signature, required=True)
    a.add_argument("--format", choices=("text", "json"), default="text")

    e = sub.add_parser("errata", help="write the coefficient corrections to JSON")
    e.add_argument("--signature", type=_signature, required=True)
    e.add_argument("--out", type=Path, required=True)
    e.add_argument("--trials", type=int, default=20)
    e.add_argument("--seed", type=int, default=0)
    return parser


def cmd_verify(args) -> int:
    sigs = args.signature or [Signature.parse(s) for s in DEFAULT_SIGNATURES]
    cfg = TestConfig(signatures=sigs, trials=args.trials, seed=args.seed, oracle_trials=args.oracle_trials)
    suites = SUITES if args.suite == "all" else (args.suite,)
    reports = run_suites(cfg, suites)
    for r in reports:
        print(f"{r.status.upper():17s} {r.signature:5s} {r.check_id:24s} {r.anchor}")
    errata = [r for r in reports if r.status == "pass-with-errata"]
    if errata:
        print(f"warning: {len(errata)} check(s) passed only after machine-derived coefficient corrections")
    failed = [r for r in reports if r.status == "fail"]
    if args.report:
        report = build_report(cfg, reports, timing=not args.no_timing)
        args.report.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(f"{len(reports) - len(failed)}/{len(reports)} checks without failure")
    return 1 if failed else 0


def cmd_print(args) -> int:
    opset = build_operator_set(args.signature)
    if args.format == "latex":
        print(latex_export(opset, args.op))
        return 0
    if args.op == "explicit":
        if args.format == "json":
            data = {lbl.value: op_to_json(op) for lbl, op in opset.explicit_terms.items()}
            print(json.dumps(data, indent=2))
        else:
            for lbl, op in opset.explicit_terms.items():
                print(f"({lbl.value}) {render_text(op)}")
        return 0
    op = opset.named()[args.op]
    if args.format == "json":
        print(json.dumps(op_to_json(op), indent=2))
    else:
        print(render_text(op))
    return 0


def cmd_apply(args, parser: argparse.ArgumentParser) -> int:
    opset = build_operator_set(args.signature)
    named = opset.named()
    if args.op not in named:
        parser.error(f"unknown operator {args.op!r}; choose from {', '.join(sorted(named))}")
    try:
        data = json.loads(args.function.read_text())
        f = PowerFunc.from_json(args.signature, data).specialize(args.lam, args.mu)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"error: cannot read function spec: {exc}", file=sys.stderr)
        return 2
    op = named[args.op].specialize(args.lam, args.mu)
    poly = f.as_poly()
    if poly is not None:
        res = apply_to_poly(op, poly)
        if res.qxy_exp >= 0:
            out = PowerFunc.from_poly(args.signature, res.num)
        else:
            out = func_apply_weyl(op, f)
    else:
        out = func_apply_weyl(op, f)
    if args.format == "json":
        print(json.dumps(out.to_json(), indent=2))
    else:
        print(out)
    return 0


def cmd_errata(args) -> int:
    opset = build_operator_set(args.signature)
    ok, rows = confirm_table(opset, args.trials, args.seed)
    data = {
        "signature": [args.signature.p, args.signature.q],
        "twelve_term_table": [r.to_json() for r in opset.errata],
        "closed_form": [r.to_json() for r in opset.closed_errata],
        "independent_confirmation": {"all_trials_consistent": ok, "trials": args.trials, "seed": args.seed, "rows": [r.to_json() for r in rows]},
    }
    args.out.write_text(json.dumps(data, indent=2) + "\n")
    print(f"{len(opset.errata)} table row(s), {len(opset.closed_errata)} closed-form coefficient(s) written to {args.out}")
    return 0 if ok else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args)
    if args.command == "print":
        return cmd_print(args)
    if args.command == "apply":
        return cmd_apply(args, parser)
    return cmd_errata(args)


if __name__ == "__main__":
    sys.exit(main())
