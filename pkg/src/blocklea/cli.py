"""Command line front end: gen, solve, graph, check, bench."""

from __future__ import annotations

import argparse
import logging
import sys
import time

from . import bench
from .elimination import DEFAULT_WIDTH_CAP, PartitionError, WidthLimitError, forward, backward, solve_lea
from .generator import GeneratorParams, generate, staircase_partition
from .graph import (build_interaction_graph, find_indistinguishable_blocks, parse_partition,
                    quotient_graph, to_dot)
from .model import (INFEASIBLE, OPTIMAL, ParseError, Solution, evaluate, parse_solution,
                    read_instance, serialize_instance, serialize_solution, violated_constraints)
from .subsolver import (BNB, STRATEGIES, BudgetExhausted, CapExceeded, Deadline, LocalSolver,
                        SolveTimeout, solve_monolithic)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_INFEASIBLE = 4
EXIT_TIMEOUT = 5
EXIT_WIDTH = 6
EXIT_CORRECTNESS = 7
EXIT_CHECK_FAILED = 8

log = logging.getLogger("blocklea")


class MissingPartition(Exception):
    pass


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def choose_partition(instance, source, partition_path):
    if source == "auto":
        source = "file" if partition_path else "meta" if instance.meta else None
    if source == "file":
        if not partition_path:
            raise MissingPartition("--partition-source file needs --partition")
        return parse_partition(_read(partition_path), instance.n)
    if source == "meta":
        if instance.meta is None:
            raise MissingPartition("instance has no staircase meta header")
        return staircase_partition(instance.meta)
    if source == "blocks":
        return find_indistinguishable_blocks(build_interaction_graph(instance))
    raise MissingPartition("lea modes need a partition: pass --partition FILE, "
                           "use an instance with a meta header, or --partition-source blocks")


def cmd_gen(args):
    params = GeneratorParams(args.n, args.m, args.k, args.b, args.seed,
                             (args.coeff_min, args.coeff_max))
    _write(args.output, serialize_instance(generate(params)))
    return EXIT_OK


def cmd_solve(args):
    instance = read_instance(args.instance)
    partition = None
    if args.mode != "mono":
        partition = choose_partition(instance, args.partition_source, args.partition)
    deadline = Deadline(args.timeout)
    t0 = time.perf_counter()
    try:
        if args.mode == "mono":
            sol = solve_monolithic(instance, args.strategy, deadline=deadline)
        elif args.trace:
            solver = LocalSolver(args.strategy, package=args.mode == "lea-pkg")
            record = forward(instance, partition, solver, deadline=deadline, width_cap=args.width_cap)
            sys.stderr.write(record.dump())
            sol = (Solution(OPTIMAL, backward(record), record.final_value) if record.feasible
                   else Solution(INFEASIBLE))
        else:
            solver = LocalSolver(args.strategy, package=args.mode == "lea-pkg")
            sol = solve_lea(instance, partition, solver, deadline=deadline, width_cap=args.width_cap)
    except SolveTimeout:
        print(f"{args.mode} TIMEOUT - {time.perf_counter() - t0:.6f}")
        return EXIT_TIMEOUT
    seconds = time.perf_counter() - t0
    if args.output:
        _write(args.output, serialize_solution(sol))
    obj = sol.objective if sol.optimal else "-"
    print(f"{args.mode} {sol.status} {obj} {seconds:.6f}")
    return EXIT_OK if sol.optimal else EXIT_INFEASIBLE


def cmd_graph(args):
    instance = read_instance(args.instance)
    g = build_interaction_graph(instance)
    if args.quotient:
        partition = choose_partition(instance, args.partition_source, args.partition)
        q = quotient_graph(g, partition)
        text = to_dot(q, "Q") if args.dot else "".join(f"X{i + 1} X{k + 1}\n" for i, k in sorted(q.edges))
    else:
        text = to_dot(g) if args.dot else "".join(f"x{u + 1} x{v + 1}\n" for u, v in g.edges())
    _write(args.output, text)
    return EXIT_OK


def cmd_check(args):
    instance = read_instance(args.instance)
    sol = parse_solution(_read(args.solution))
    if not sol.optimal:
        print("solution claims infeasible; nothing to check")
        return EXIT_OK
    if len(sol.x) != instance.n:
        print(f"assignment length {len(sol.x)} != n={instance.n}")
        return EXIT_CHECK_FAILED
    feasible, value = evaluate(instance, sol.x)
    problems = [f"violated constraint {i + 1}" for i in violated_constraints(instance, sol.x)]
    if value != sol.objective:
        problems.append(f"objective mismatch: claimed {sol.objective}, actual {value}")
    for p in problems:
        print(p)
    if problems:
        return EXIT_CHECK_FAILED
    print("ok")
    return EXIT_OK


def cmd_bench(args):
    rows = bench.parse_bench_spec(_read(args.spec))
    reports = bench.run_bench(rows, args.jobs, args.strategy)
    _write(args.output, bench.report_csv(reports))
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="blocklea", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a staircase instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--coeff-min", type=int, default=1)
    p.add_argument("--coeff-max", type=int, default=10)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    def partition_args(p):
        p.add_argument("--partition", help="partition file ('block v1 v2 ...' lines)")
        p.add_argument("--partition-source", choices=("auto", "file", "meta", "blocks"), default="auto")

    p = sub.add_parser("solve", help="solve an instance")
    p.add_argument("instance")
    p.add_argument("--mode", choices=bench.MODES, default="lea")
    p.add_argument("--strategy", choices=STRATEGIES, default=BNB)
    p.add_argument("--timeout", type=float, default=120.0)
    p.add_argument("--trace", action="store_true", help="dump elimination tables to stderr")
    p.add_argument("--width-cap", type=int, default=DEFAULT_WIDTH_CAP,
                   help="largest neighborhood a block may have")
    p.add_argument("-o", "--output", help="solution file")
    partition_args(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("graph", help="print the interaction or quotient graph")
    p.add_argument("instance")
    p.add_argument("--quotient", action="store_true")
    p.add_argument("--dot", action="store_true", help="emit DOT instead of an edge list")
    p.add_argument("-o", "--output")
    partition_args(p)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("check", help="verify a solution file against an instance")
    p.add_argument("instance")
    p.add_argument("solution")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench", help="run a bench spec and write a CSV report")
    p.add_argument("spec")
    p.add_argument("-o", "--output")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--strategy", choices=STRATEGIES, default=BNB)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ParseError, PartitionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except MissingPartition as exc:
        print(f"error: missing partition: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WidthLimitError as exc:
        print(f"error: width limit: {exc}", file=sys.stderr)
        return EXIT_WIDTH
    except SolveTimeout:
        return EXIT_TIMEOUT
    except bench.CorrectnessError as exc:
        print(f"error: correctness: {exc}", file=sys.stderr)
        return EXIT_CORRECTNESS
    except (CapExceeded, BudgetExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_WIDTH
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
