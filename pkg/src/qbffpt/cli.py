"""Command-line driver: ``qbffpt <subcommand> [options] [file]``.

Exit codes follow the SAT-solver convention: 10 for TRUE, 20 for FALSE,
0 for non-decision subcommands and 1 for errors or exhausted budgets.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import Sequence

from . import __version__
from .clause_graph import ClauseGraph, build_cgis
from .expansion import TautInstance, VarPool, expand_all
from .forge import PREFIX_SHAPES, is_to_multipartite, multipartite_is_to_qbf, random_qdcnf
from .formats import (
    ParseError,
    dump_cgis,
    dump_taut,
    parse_cgis,
    parse_graph,
    parse_multipartite,
    parse_qcsp,
    parse_qdimacs,
    parse_taut,
    serialize_qdimacs,
)
from .formula import FormulaError, QbfInstance
from .kernel import PAPER, SAFE, kernelize
from .qcsp import qcsp_to_qbf
from .search import METHODS, Budget, BudgetExceeded, solve

EXIT_TRUE = 10
EXIT_FALSE = 20
EXIT_ERROR = 1

log = logging.getLogger("qbffpt")


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qbffpt", description="QBF solving parameterized by existential variables.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", nargs="?", default="-", help="input file, '-' for stdin")
    common.add_argument("--format", choices=("human", "kv"), default="human", help="stats layout")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings in the stats")

    pipeline = argparse.ArgumentParser(add_help=False)
    pipeline.add_argument("--kernel-mode", choices=(SAFE, PAPER), default=SAFE)
    pipeline.add_argument("--jobs", type=_positive_int, default=1, help="worker processes for kernelization")
    pipeline.add_argument("--no-prune", action="store_true", help="keep constant formulas during expansion")
    pipeline.add_argument("--budget-parts", type=_positive_int)
    pipeline.add_argument("--budget-clauses", type=_positive_int)
    pipeline.add_argument("--budget-time", type=_positive_float, help="seconds")

    p = sub.add_parser("solve", parents=[common, pipeline], help="decide a QDIMACS instance")
    p.add_argument("--method", choices=METHODS, default="auto")

    sub.add_parser("expand", parents=[common, pipeline], help="eliminate existentials, print the TAUT dump")
    sub.add_parser("reduce", parents=[common, pipeline], help="build the clause graph, print the CGIS dump")
    sub.add_parser("kernel", parents=[common, pipeline], help="kernelize the clause graph, print CGIS dump and report")

    g = sub.add_parser("generate", help="print a generated QDIMACS instance")
    g.add_argument("--hardness-from", metavar="GRAPH", help="edge-list graph to encode as a forall-exists CNF")
    g.add_argument("--lift-k", type=_positive_int, help="treat GRAPH as a plain graph and ask for an IS of size k")
    g.add_argument("--no-strict", action="store_true", help="omit same-vertex edges when lifting")
    g.add_argument("--universal", type=int, default=10)
    g.add_argument("--existential", type=int, default=2)
    g.add_argument("--width", type=int, default=3)
    g.add_argument("--clauses", type=int, default=10)
    g.add_argument("--shape", choices=PREFIX_SHAPES, default="random")
    g.add_argument("--seed", type=int, default=0)

    sub.add_parser("compile-qcsp", parents=[common], help="compile a QCSP file to QDIMACS")
    return parser


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _first_format(data: bytes) -> str | None:
    for line in data.splitlines():
        toks = line.split()
        if not toks or toks[0] == b"c":
            continue
        if toks[0] == b"format" and len(toks) > 1:
            return toks[1].decode("ascii", "replace")
        return None
    return None


def _load_qbf(data: bytes) -> QbfInstance:
    warnings: list = []
    inst = parse_qdimacs(data, warnings)
    for w in warnings:
        log.warning("%s", w)
    return inst


def _budget(args) -> Budget:
    return Budget(args.budget_parts, args.budget_clauses, args.budget_time)


def _emit_stats(stats: dict, args, out) -> None:
    prefix = "" if args.format == "kv" else "c "
    for key, value in stats.items():
        if key.startswith("time_") and not args.timings:
            continue
        if isinstance(value, float):
            value = f"{value:.6f}"
        print(f"{prefix}{key}={value}", file=out)


def _expand(inst: QbfInstance, args) -> TautInstance:
    budget = _budget(args)
    if budget.max_parts is not None and 2**inst.k > budget.max_parts:
        raise BudgetExceeded("parts")
    t = expand_all(inst, prune=not args.no_prune, pool=VarPool(inst.max_var()))
    if budget.max_clauses is not None and t.clause_count() > budget.max_clauses:
        raise BudgetExceeded("clauses")
    return t


def _graph_from(data: bytes, args) -> ClauseGraph:
    kind = _first_format(data)
    if kind == "cgis":
        return parse_cgis(data)
    if kind == "taut":
        return build_cgis(parse_taut(data))
    return build_cgis(_expand(_load_qbf(data), args))


def cmd_solve(args) -> int:
    inst = _load_qbf(_read(args.input))
    verdict = solve(
        inst,
        method=args.method,
        kernel_mode=args.kernel_mode,
        prune=not args.no_prune,
        budget=_budget(args),
        jobs=args.jobs,
    )
    answer = "TRUE" if verdict.answer else "FALSE"
    if args.format == "kv":
        print(f"answer={answer}")
        _emit_stats(verdict.stats, args, sys.stdout)
    else:
        print(f"s {answer}")
        _emit_stats(verdict.stats, args, sys.stderr)
    if verdict.witness is not None:
        static = verdict.witness.as_assignment()
        if static is not None:
            lits = [v if value else -v for v, value in sorted(static.items())]
            print(" ".join(["v", *map(str, lits), "0"]))
        else:
            for x, table in sorted(verdict.witness.table.items()):
                for tag, value in sorted(table.items()):
                    print(f"t {x} {tag or '-'} {int(value)}")
    return EXIT_TRUE if verdict.answer else EXIT_FALSE


def cmd_expand(args) -> int:
    inst = _load_qbf(_read(args.input))
    t = _expand(inst, args)
    sys.stdout.write(dump_taut(t))
    _emit_stats({"k": inst.k, "d": inst.d, "formulas": len(t.formulas), "clauses": t.clause_count()}, args, sys.stderr)
    return 0


def cmd_reduce(args) -> int:
    g = _graph_from(_read(args.input), args)
    sys.stdout.write(dump_cgis(g))
    _emit_stats({"parts": g.K, "d": g.d, "part_sizes": ",".join(map(str, g.part_sizes()))}, args, sys.stderr)
    return 0


def cmd_kernel(args) -> int:
    g = _graph_from(_read(args.input), args)
    kernel, report = kernelize(g, args.kernel_mode, jobs=args.jobs)
    sys.stdout.write(dump_cgis(kernel))
    _emit_stats(report.kv(), args, sys.stderr)
    return 0


def cmd_generate(args) -> int:
    if args.hardness_from:
        data = _read(args.hardness_from)
        if args.lift_k:
            parts, vertices, edges = parse_graph(data)
            if parts:
                vertices = [v for p in parts for v in p]
            graph = is_to_multipartite(vertices, edges, args.lift_k, strict=not args.no_strict)
        else:
            graph = parse_multipartite(data)
        inst = multipartite_is_to_qbf(graph)
        comments = [f"hardness parts={graph.K} vertices={len(graph.vertices())} edges={len(graph.edges)}"]
    else:
        inst = random_qdcnf(args.universal, args.existential, args.width, args.clauses, args.shape, args.seed)
        comments = [
            f"random universal={args.universal} existential={args.existential} width={args.width} "
            f"clauses={args.clauses} shape={args.shape} seed={args.seed}"
        ]
    sys.stdout.write(serialize_qdimacs(inst, comments))
    return 0


def cmd_compile_qcsp(args) -> int:
    inst = parse_qcsp(_read(args.input))
    sys.stdout.write(serialize_qdimacs(qcsp_to_qbf(inst)))
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "expand": cmd_expand,
    "reduce": cmd_reduce,
    "kernel": cmd_kernel,
    "generate": cmd_generate,
    "compile-qcsp": cmd_compile_qcsp,
}


def main(argv: Sequence[str] | None = None) -> int:
    level = os.environ.get("QBFFPT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="c %(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except BudgetExceeded as exc:
        print(f"UNDECIDED budget={exc.which}")
        return EXIT_ERROR
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (FormulaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
