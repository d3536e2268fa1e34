"""Timed comparison of monolithic solving against block elimination on generated instances."""

from __future__ import annotations

import csv
import io
import logging
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .elimination import solve_lea
from .generator import GeneratorParams, generate, staircase_partition
from .model import ParseError
from .subsolver import BNB, Deadline, LocalSolver, SolveTimeout, solve_monolithic

log = logging.getLogger(__name__)

MODES = ("mono", "lea", "lea-pkg")
TIMEOUT = "TIMEOUT"
CSV_COLUMNS = ("n", "m", "k", "b", "mode", "median_seconds", "objective", "status")


class CorrectnessError(RuntimeError):
    """Completed modes disagree on a bench row."""


@dataclass(frozen=True)
class BenchRow:
    params: GeneratorParams
    modes: tuple[str, ...] = MODES
    repetitions: int = 1
    timeout: float = 120.0

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        bad = set(self.modes) - set(MODES)
        if bad or not self.modes:
            raise ValueError(f"unknown modes {sorted(bad)}")


@dataclass
class ModeResult:
    mode: str
    status: str
    median_seconds: float | None = None
    objective: int | None = None
    times: tuple[float, ...] = ()

    @property
    def completed(self) -> bool:
        return self.status != TIMEOUT


@dataclass
class RowReport:
    row: BenchRow
    results: list[ModeResult]

    @property
    def agreement(self) -> bool:
        done = {(r.status, r.objective) for r in self.results if r.completed}
        return len(done) <= 1


def parse_bench_spec(text: str) -> list[BenchRow]:
    """One row per line: ``n m k b seed modes reps timeout``; modes comma-separated or ``all``."""
    rows = []
    for no, raw in enumerate(text.splitlines(), 1):
        tok = raw.split("#", 1)[0].split()
        if not tok:
            continue
        if len(tok) != 8:
            raise ParseError("expected 'n m k b seed modes reps timeout'", no)
        try:
            n, m, k, b, seed = map(int, tok[:5])
            modes = MODES if tok[5] == "all" else tuple(tok[5].split(","))
            rows.append(BenchRow(GeneratorParams(n, m, k, b, seed), modes, int(tok[6]), float(tok[7])))
        except ValueError as exc:
            raise ParseError(str(exc), no) from None
    return rows


def solve_mode(mode: str, instance, partition, timeout: float, strategy: str = BNB):
    deadline = Deadline(timeout)
    if mode == "mono":
        return solve_monolithic(instance, strategy, deadline=deadline)
    solver = LocalSolver(strategy, package=(mode == "lea-pkg"))
    return solve_lea(instance, partition, solver, deadline=deadline)


def run_row(row: BenchRow, strategy: str = BNB) -> RowReport:
    instance = generate(row.params)
    partition = staircase_partition(instance.meta)
    results = []
    for mode in row.modes:
        times, sol = [], None
        for _ in range(row.repetitions):
            t0 = time.perf_counter()
            try:
                sol = solve_mode(mode, instance, partition, row.timeout, strategy)
            except SolveTimeout:
                sol = None
                break
            times.append(time.perf_counter() - t0)
        if sol is None:
            results.append(ModeResult(mode, TIMEOUT))
        else:
            results.append(ModeResult(mode, sol.status, statistics.median(times),
                                      sol.objective, tuple(times)))
        log.info("n=%d b=%d %s: %s", row.params.n, row.params.b, mode, results[-1].status)
    report = RowReport(row, results)
    if not report.agreement:
        p = row.params
        detail = ", ".join(f"{r.mode}={r.status}/{r.objective}" for r in results if r.completed)
        raise CorrectnessError(f"modes disagree on n={p.n} m={p.m} k={p.k} b={p.b} seed={p.seed}: {detail}")
    return report


def run_bench(rows: list[BenchRow], jobs: int = 1, strategy: str = BNB) -> list[RowReport]:
    if jobs <= 1:
        return [run_row(r, strategy) for r in rows]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda r: run_row(r, strategy), rows))


def report_csv(reports: list[RowReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rep in reports:
        p = rep.row.params
        for r in rep.results:
            secs = "" if r.median_seconds is None else f"{r.median_seconds:.6f}"
            obj = "" if r.objective is None else r.objective
            w.writerow((p.n, p.m, p.k, p.b, r.mode, secs, obj, r.status))
    return buf.getvalue()
