"""Command-line front end.

Exit codes: 0 all checks passed, 1 a claim was violated, 2 usage or
domain error, 3 precision exhausted under the padic engine.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from . import __version__
from . import explorer as ex
from .fsum import DEFAULT_PRECISION, PrecisionExhausted, f_exact, f_padic
from .harness import CHECKS, CLI_NAMES, run_sweep
from .report import CsvRowWriter, render_valuation, to_json
from .valuation import nu2

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_PRECISION = 3

GATE_CHECKS = {"recurrence-vs-direct", "engines-agree"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _diagnostic(kind: str, code: int, message: str) -> None:
    message = message.replace('"', "'").replace("\n", " ")
    print(f'binomsum: error={kind} exit={code} message="{message}"', file=sys.stderr)


def _default_precision() -> int:
    raw = os.environ.get("BINOMSUM_PRECISION")
    if raw is None:
        return DEFAULT_PRECISION
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"BINOMSUM_PRECISION must be an integer, got {raw!r}") from None
    if value < 1:
        raise UsageError("BINOMSUM_PRECISION must be >= 1")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _natural(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="binomsum", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"binomsum {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    engine = _Parser(add_help=False)
    engine.add_argument("--engine", choices=["exact", "padic"], default="exact")
    engine.add_argument("--precision", type=_positive, default=None,
                        help="initial 2-adic precision P (default 64 or $BINOMSUM_PRECISION)")
    engine.add_argument("--no-fallback", action="store_true",
                        help="padic engine: fail with exit 3 instead of falling back to exact")

    v = sub.add_parser("verify", parents=[engine], help="run an exhaustive check")
    v.add_argument("check", choices=sorted(CLI_NAMES))
    v.add_argument("--e-min", type=_natural, default=1)
    v.add_argument("--e-max", type=_natural, required=True)
    v.add_argument("--jobs", type=_positive, default=os.cpu_count() or 1)
    v.add_argument("--json", dest="json_path")
    v.add_argument("--csv", dest="csv_path")
    v.add_argument("--equality-only", action="store_true", help="CSV keeps only equality rows")
    v.add_argument("--fail-fast", action="store_true")
    v.add_argument("--a-max", type=_natural, default=30, help="sumj: largest a (default 30)")

    t = sub.add_parser("trace", parents=[engine], help="trace f(x_j) for a 2-adic integer")
    t.add_argument("--spec", required=True)
    t.add_argument("--max-exponent", type=_natural, default=ex.DEFAULT_MAX_EXPONENT)
    t.add_argument("--json", dest="json_path")

    e = sub.add_parser("eval", parents=[engine], help="evaluate f")
    e.add_argument("function", choices=["f"])
    e.add_argument("--n", type=_natural, required=True)

    h = sub.add_parser("hypothesis", help="trend of a definability hypothesis")
    h.add_argument("--spec", required=True)
    h.add_argument("--horizon", type=_positive, required=True)
    h.add_argument("--which", choices=["cor1", "cor2"], default="cor1")
    return parser


def _cmd_verify(args) -> int:
    if args.e_min > args.e_max:
        raise UsageError(f"empty e range: --e-min {args.e_min} > --e-max {args.e_max}")
    check_id = CLI_NAMES[args.check]
    precision = args.precision or _default_precision()
    csv_file = open(args.csv_path, "w", newline="") if args.csv_path else None
    try:
        sink = CsvRowWriter(csv_file, args.equality_only) if csv_file else None
        report = run_sweep(check_id, (args.e_min, args.e_max), engine=args.engine,
                           workers=args.jobs, precision=precision,
                           fallback=not args.no_fallback, a_max=args.a_max,
                           keep_rows=False, sink=sink, fail_fast=args.fail_fast)
    finally:
        if csv_file:
            csv_file.close()
    if args.json_path:
        with open(args.json_path, "w", newline="") as fh:
            fh.write(to_json(report, args.check))

    check = CHECKS[check_id]
    print(f"check={args.check} e={args.e_min}..{args.e_max} engine={report.engine} "
          f"rows={report.rows_total} violations={len(report.violations)} "
          f"equalities={len(report.equality_cases)} duration_ms={report.duration_ms}")
    if check.kind == "conjecture":
        for e_val, ks in sorted(report.equality_ks().items()):
            print(f"  e={e_val} equality k={ks}")
    if report.retries:
        print("  padic retries: " + " ".join(f"{t}:{c}" for t, c in sorted(report.retries.items())))
    if report.violations:
        first = report.violations[0]
        where = f"e={first.e} k={first.k}" + ("" if first.i is None else f" i={first.i}")
        if report.is_finding:
            print(f"FINDING: {args.check} fails at {where}: nu={render_valuation(first.observed)} "
                  f"< bound={render_valuation(first.bound)} "
                  f"({len(report.violations)} counterexample(s))", file=sys.stderr)
        else:
            print(f"DEFECT: proved statement {args.check} fails at {where}; "
                  f"this indicates a bug in the library", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _trace_json(tr: ex.ConvergenceTrace, diag: ex.CauchyDiagnostic, spec_text: str) -> str:
    rows = [{
        "i": r.i, "e_i": r.e_i, "x_prev": r.x_prev,
        "step_val": render_valuation(r.step_val) if r.step_val == float("inf") else r.step_val,
        "conj1_bound": r.conj1_bound, "conj2_bound": r.conj2_bound,
        "distance": str(r.distance), "excess": r.excess,
    } for r in tr.rows]
    doc = {
        "spec": spec_text, "max_exponent": tr.max_exponent, "engine": tr.engine,
        "rows": rows,
        "cauchy": {"tail_min": render_valuation(diag.tail_min), "slope": diag.slope,
                   "label": diag.label, "heuristic": diag.heuristic, "note": diag.note},
        "artifact_version": __version__,
    }
    return json.dumps(doc, indent=2) + "\n"


def _cmd_trace(args) -> int:
    spec = ex.parse_spec(args.spec)
    precision = args.precision or _default_precision()
    tr = ex.trace(spec, args.max_exponent, args.engine, precision)
    diag = ex.cauchy_verdict(tr)
    print("i,e_i,x_prev,step_val,conj1_bound,conj2_bound,distance,excess")
    violated = False
    for r in tr.rows:
        c2 = "" if r.conj2_bound is None else str(r.conj2_bound)
        print(f"{r.i},{r.e_i},{r.x_prev},{render_valuation(r.step_val)},{r.conj1_bound},{c2},"
              f"{r.distance},{r.excess}")
        if r.step_val < r.conj1_bound or (r.conj2_bound is not None and r.step_val < r.conj2_bound):
            violated = True
    print(f"cauchy: {diag.label} (tail_min={render_valuation(diag.tail_min)}, "
          f"slope={diag.slope:.4g}; heuristic: {diag.note})")
    if args.json_path:
        with open(args.json_path, "w", newline="") as fh:
            fh.write(_trace_json(tr, diag, args.spec))
    if violated:
        print("FINDING: a trace step falls below a conjectured bound", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _cmd_eval(args) -> int:
    if args.engine == "exact":
        value = f_exact(args.n)
        print(f"{value}  nu2={render_valuation(nu2(value))}")
    else:
        approx = f_padic(args.n, args.precision or _default_precision())
        print(f"2^{approx.valuation}*{approx.unit} mod 2^{approx.absolute_precision}"
              f"  nu2={approx.valuation}")
    return EXIT_OK


def _cmd_hypothesis(args) -> int:
    spec = ex.parse_spec(args.spec)
    fn = ex.cor1_hypothesis if args.which == "cor1" else ex.cor2_hypothesis
    rep = fn(spec, args.horizon)
    label = "excess" if args.which == "cor1" else "e_next-2e"
    shown = rep.values[-8:]
    print(f"{args.which}: {label} (last {len(shown)} of {len(rep.values)}) = {shown}")
    print(f"verdict: {rep.verdict} ({'analytic' if rep.analytic else 'numeric'})"
          + (f"; {rep.note}" if rep.note else ""))
    return EXIT_OK


COMMANDS = {"verify": _cmd_verify, "trace": _cmd_trace, "eval": _cmd_eval,
            "hypothesis": _cmd_hypothesis}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        _diagnostic("usage", EXIT_USAGE, str(exc))
        return EXIT_USAGE
    except PrecisionExhausted as exc:
        _diagnostic("precision", EXIT_PRECISION, str(exc))
        return EXIT_PRECISION
    except (ValueError, ex.HorizonError) as exc:
        _diagnostic("domain", EXIT_USAGE, str(exc))
        return EXIT_USAGE
    except OSError as exc:
        _diagnostic("io", EXIT_USAGE, str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
