"""Block local elimination: forward table building and backward recovery."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .graph import (InteractionGraph, OrderedPartition, block_neighborhood,
                    build_interaction_graph, eliminate_block, validate_partition)
from .model import INFEASIBLE, OPTIMAL, IlpInstance, Solution, SolveStats
from .subsolver import Deadline, LocalSolver, SolverError
from .tables import BlockPackage, LocalTable, TableComponent

DEFAULT_WIDTH_CAP = 25


class PartitionError(ValueError):
    pass


class WidthLimitError(SolverError):
    pass


@dataclass
class EliminationRecord:
    n: int
    tables: list[LocalTable]
    final_value: int | None
    stats: SolveStats = field(default_factory=SolveStats)
    graphs: list[InteractionGraph] | None = None

    @property
    def feasible(self) -> bool:
        return self.final_value is not None

    def dump(self) -> str:
        return "\n".join(t.format() for t in self.tables)


def _check_partition(instance: IlpInstance, partition: OrderedPartition) -> None:
    problem = validate_partition(partition, instance.n)
    if problem:
        raise PartitionError(problem)


def forward(instance: IlpInstance, partition: OrderedPartition,
            subsolver: LocalSolver | None = None, *, deadline: Deadline | None = None,
            width_cap: int = DEFAULT_WIDTH_CAP, trace: bool = False) -> EliminationRecord:
    """Eliminate the blocks of ``partition`` in order, storing one table per block.

    A block's subproblem owns the objective coefficients of its own variables,
    every not yet used constraint touching the block, and every stored table
    whose scope touches the block or lies inside its neighborhood (the latter
    merge into the new table; empty scopes are constants and merge into the
    next block).
    """
    _check_partition(instance, partition)
    subsolver = subsolver or LocalSolver()
    stats = SolveStats()
    graph = build_interaction_graph(instance)
    graphs = [graph.copy()] if trace else None
    pending = list(range(instance.m))
    components: list[TableComponent] = []
    tables = []

    for j, block in enumerate(partition.blocks):
        in_block = set(block)
        nb = tuple(sorted(block_neighborhood(graph, block)))
        if len(nb) > width_cap:
            raise WidthLimitError(f"block {j + 1} has {len(nb)} neighbors, cap is {width_cap}")
        bpos = {v: p for p, v in enumerate(block)}
        npos = {v: p for p, v in enumerate(nb)}

        used, rows = [], []
        for i in pending:
            con = instance.constraints[i]
            if not in_block.intersection(con.variables):
                continue
            bc, nc = [0] * len(block), [0] * len(nb)
            for v, a in con.support:
                if v in bpos:
                    bc[bpos[v]] = a
                else:
                    nc[npos[v]] = a
            used.append(i)
            rows.append((tuple(bc), tuple(nc), con.rhs))
        consumed = [c for c in components
                    if in_block.intersection(c.scope) or set(c.scope) <= set(nb)]

        pkg = BlockPackage(tuple(block), nb, tuple(instance.objective[v] for v in block),
                           tuple(rows), tuple(consumed))
        table = subsolver.table(pkg, stats, deadline)
        table.constraints_used = tuple(used)
        table.consumed = tuple(c.origin for c in consumed)
        table.origin = j
        tables.append(table)

        used_set = set(used)
        pending = [i for i in pending if i not in used_set]
        components = [c for c in components if c not in consumed]
        if j < len(partition) - 1:
            components.append(table.as_component())
        eliminate_block(graph, block, inplace=True)
        if trace:
            graphs.append(graph.copy())

    last = tables[-1]
    assert not last.neighborhood and not components and not pending
    entry = last.entry(0)
    return EliminationRecord(instance.n, tables, None if entry is None else entry[0], stats, graphs)


def backward(record: EliminationRecord) -> tuple[int, ...]:
    """Recover a full optimal assignment from the stored local optima."""
    if not record.feasible:
        raise ValueError("cannot recover an assignment from an infeasible record")
    x: list[int | None] = [None] * record.n
    for table in reversed(record.tables):
        entry = table.lookup(x)
        if entry is None:
            raise RuntimeError(f"table {table.origin + 1} has no feasible entry for the chosen neighborhood")
        for v, bit in zip(table.block, entry[1]):
            x[v] = bit
    return tuple(x)


def solve_lea(instance: IlpInstance, partition: OrderedPartition,
              subsolver: LocalSolver | None = None, *, timeout: float | None = None,
              deadline: Deadline | None = None, width_cap: int = DEFAULT_WIDTH_CAP) -> Solution:
    if deadline is None:
        deadline = Deadline(timeout)
    t0 = time.perf_counter()
    record = forward(instance, partition, subsolver, deadline=deadline, width_cap=width_cap)
    x = backward(record) if record.feasible else None
    record.stats.seconds = time.perf_counter() - t0
    if x is None:
        return Solution(INFEASIBLE, stats=record.stats)
    return Solution(OPTIMAL, x, record.final_value, record.stats)


def table_width_report(instance: IlpInstance, partition: OrderedPartition) -> list[tuple[tuple[int, ...], int, int]]:
    """Neighborhood width of each block under elimination, without solving anything."""
    _check_partition(instance, partition)
    graph = build_interaction_graph(instance)
    out = []
    for block in partition.blocks:
        w = len(block_neighborhood(graph, block))
        out.append((block, w, 1 << w))
        eliminate_block(graph, block, inplace=True)
    return out
