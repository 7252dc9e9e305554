"""Command-line interface: ``fifostack <command> ...``.

Exit codes: 0 success, 1 usage or parse error, 2 capacity/budget exceeded,
3 a solution that does not verify.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench
from .errors import CapacityError, FifoStackError, ParseError
from .exact import CSV_HEADER, DEFAULT_CUT_STEP
from .gen import GenParams, generate, validate_params
from .ilp import build_bin_model, build_pallet_model, emit_lp
from .instance import compute_stats, emit_instance, emit_solution, parse_instance, parse_solution, verify_solution
from .runner import ALGORITHMS, RunOptions, run
from .seqgraph import build_sequence_graph, emit_digraph, parse_digraph

EXIT_OK, EXIT_USAGE, EXIT_CAPACITY, EXIT_REJECTED = 0, 1, 2, 3
DEFAULT_TIME_LIMIT_S = 1800.0

log = logging.getLogger("fifostack")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_instance(path: str):
    return parse_instance(_read(path), name=Path(path).stem if path != "-" else "stdin")


def _options(args) -> RunOptions:
    limit = args.time_limit_s if args.time_limit_s and args.time_limit_s > 0 else None
    return RunOptions(node_budget=args.budget_nodes, time_limit_s=limit, cut_step=args.cut_step)


def cmd_solve(args) -> int:
    inst = _load_instance(args.input)
    report = run(args.algo, inst, _options(args))
    print(f"optimum {report.optimum}")
    if report.solution is not None:
        text = emit_solution(report.solution, inst)
        if args.solution_out:
            _write(args.solution_out, text)
        else:
            sys.stdout.write(text)
    bench.write_csv(sys.stdout, CSV_HEADER, [report.csv_row(inst.name)])
    if args.export_lp:
        _export(inst, args.export_lp, "pallet" if args.algo == "ilp-pallet-tiny" else "bin")
    return EXIT_OK


def _export(inst, path: str, kind: str) -> None:
    if kind == "bin":
        model = build_bin_model(inst, inst.name)
    else:
        model = build_pallet_model(build_sequence_graph(inst), inst.name)
    _write(path, emit_lp(model))


def cmd_export_lp(args) -> int:
    text = _read(args.input)
    if text.lstrip().startswith("digraph"):
        if args.model == "bin":
            raise ParseError("the bin model needs an instance file, not a digraph")
        _write(args.out, emit_lp(build_pallet_model(parse_digraph(text), Path(args.input).stem)))
    else:
        inst = parse_instance(text, name=Path(args.input).stem)
        _export(inst, args.out or "-", args.model)
    return EXIT_OK


def cmd_gen(args) -> int:
    params = GenParams(args.pmax, args.k, args.m, args.rmin, args.rmax, args.d, args.seed)
    for level, msg in validate_params(params):
        if level == "warning":
            log.warning("%s", msg)
    _write(args.out, emit_instance(generate(params)))
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _load_instance(args.input)
    sol = parse_solution(_read(args.solution), inst)
    verdict = verify_solution(inst, sol, args.p)
    if verdict.ok:
        print(f"ok: {sol.kind} solution uses at most {verdict.max_open} stack-up places (limit {args.p})")
        return EXIT_OK
    print(f"rejected at step {verdict.violation_step}: {verdict.reason}")
    return EXIT_REJECTED


def cmd_stats(args) -> int:
    inst = _load_instance(args.input)
    st = compute_stats(inst, args.p)
    g = build_sequence_graph(inst)
    print(f"n={st.n} m={st.m} k={st.k} N={st.N} d_Q={st.d_Q} arcs={len(g.arcs)}")
    print(f"k<m: {st.k_lt_m}  m<=n/2: {st.m_le_half_n}" + ("" if st.p_lt_m is None else f"  p<m: {st.p_lt_m}"))
    for t, tok in enumerate(inst.tokens):
        print(f"  pallet {tok}: bins={st.bins_per_pallet[t]} sequences={st.d_per_pallet[t]}")
    for w in st.warnings:
        print(f"warning: {w}")
    if args.arcs:
        sys.stdout.write(emit_digraph(g))
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.suite == "custom":
        if not args.grid:
            raise ParseError("--grid is required for the custom suite")
        with open(args.grid) as fh:
            grid = bench.read_grid(fh)
    else:
        grid = list(bench.SUITES[args.suite])
    row_ids = bench.parse_rows(args.rows, len(grid)) if args.rows else list(range(1, len(grid) + 1))
    grid = [grid[i - 1] for i in row_ids]
    algos = args.algos.split(",") if args.algos else bench.DEFAULT_ALGOS[args.suite]
    unknown = [a for a in algos if a not in ALGORITHMS]
    if unknown:
        raise ParseError(f"unknown algorithm(s): {', '.join(unknown)}")
    rows = bench.run_suite(grid, algos, args.reps, args.seed, _options(args), row_ids)
    if args.out:
        with open(args.out, "w") as fh:
            bench.write_csv(fh, bench.DETAIL_HEADER, (r.csv_row() for r in rows))
    summary = bench.summarize(rows)
    bench.write_csv(sys.stdout, bench.SUMMARY_HEADER, summary)
    if args.plot:
        bench.plot_summary(summary, args.plot, title=args.suite)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget-nodes", type=int, default=argparse.SUPPRESS, help="node budget for the searches")
    common.add_argument("--time-limit-s", type=float, default=argparse.SUPPRESS, help="per-solve limit, 0 = none")
    common.add_argument("--cut-step", type=int, default=argparse.SUPPRESS, help="cut increment for decision-cut")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="generator seed / first bench seed")
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="fifostack", description="Exact solvers for the FIFO stack-up problem.")
    parser.add_argument("--budget-nodes", type=int, default=None)
    parser.add_argument("--time-limit-s", type=float, default=DEFAULT_TIME_LIMIT_S)
    parser.add_argument("--cut-step", type=int, default=DEFAULT_CUT_STEP)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="solve an instance file")
    p.add_argument("input")
    p.add_argument("--algo", choices=ALGORITHMS, default="decision-cut")
    p.add_argument("--solution-out", metavar="PATH")
    p.add_argument("--export-lp", metavar="PATH", help="also write the ILP model for the instance")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", parents=[common], help="generate a random instance")
    for flag in ("--pmax", "--k", "--m", "--rmin", "--rmax", "--d"):
        p.add_argument(flag, type=int, required=True)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", parents=[common], help="check a solution file")
    p.add_argument("input")
    p.add_argument("solution")
    p.add_argument("--p", type=int, required=True, help="number of stack-up places")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", parents=[common], help="run a benchmark grid")
    p.add_argument("suite", choices=("table1-like", "table3-like", "custom"))
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--rows", help="1-based row selection, e.g. 1-9,19")
    p.add_argument("--algos", help=f"comma list from {', '.join(ALGORITHMS)}")
    p.add_argument("--grid", help="CSV grid (p_max,m,k,r_min,r_max,d) for the custom suite")
    p.add_argument("--out", metavar="PATH", help="per-instance CSV")
    p.add_argument("--plot", metavar="PATH", help="save a chart of mean times (needs matplotlib)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("export-lp", parents=[common], help="write an ILP model in LP format")
    p.add_argument("input", help="instance file, or digraph file for the pallet model")
    p.add_argument("--model", choices=("bin", "pallet"), default="bin")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_export_lp)

    p = sub.add_parser("stats", parents=[common], help="print instance statistics")
    p.add_argument("input")
    p.add_argument("--p", type=int, help="check the flags against this number of places")
    p.add_argument("--arcs", action="store_true", help="also print the sequence-graph arc list")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s", stream=sys.stderr)
    if args.cut_step < 1:
        print("error: --cut-step must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (FifoStackError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
