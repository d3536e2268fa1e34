"""Exact solvers for block subproblems and for whole instances.

Both strategies agree exactly, including which optimum they return: among
equally good assignments the lexicographically smallest one (block variables
in ascending order, 0 before 1) wins.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass

import numpy as np

from .model import INFEASIBLE, OPTIMAL, IlpInstance, Solution, SolveStats
from .tables import NEG, BlockPackage, LocalSubproblem, LocalTable, bit_rows, weights

EXHAUSTIVE = "exhaustive"
BNB = "bnb"
STRATEGIES = (EXHAUSTIVE, BNB)

DEFAULT_CAP = 30
DEFAULT_NODE_BUDGET = 10**8
CHUNK = 1 << 16
_CELLS = 1 << 20


class SolverError(RuntimeError):
    pass


class CapExceeded(SolverError):
    pass


class BudgetExhausted(SolverError):
    pass


class SolveTimeout(SolverError):
    pass


class Deadline:
    """Cooperative wall-clock limit; solvers poll ``check`` between units of work."""

    def __init__(self, seconds: float | None):
        self.seconds = seconds
        self.at = None if seconds is None else time.monotonic() + seconds

    def check(self) -> None:
        if self.at is not None and time.monotonic() > self.at:
            raise SolveTimeout(f"time limit of {self.seconds}s exceeded")


def _check(deadline):
    if deadline is not None:
        deadline.check()


def _matrix(rows, width: int) -> np.ndarray:
    out = np.zeros((len(rows), width), dtype=np.int64)
    for i, row in enumerate(rows):
        out[i, :] = row
    return out


def _dense(sub: LocalSubproblem):
    k = len(sub.block)
    c = np.array(sub.objective, dtype=np.int64).reshape(k)
    A = _matrix([row for row, _ in sub.constraints], k)
    rhs = np.array([r for _, r in sub.constraints], dtype=np.int64)
    return c, A, rhs


def solve_local_exhaustive(sub: LocalSubproblem, cap: int = DEFAULT_CAP,
                           stats: SolveStats | None = None, deadline: Deadline | None = None):
    """Complete enumeration of the block.  Returns ``(h, bits)`` or None if infeasible."""
    k = len(sub.block)
    if k > cap:
        raise CapExceeded(f"block of {k} variables exceeds enumeration cap {cap}")
    c, A, rhs = _dense(sub)
    terms = [(list(t.positions), weights(len(t.positions)), t.values, t.feasible) for t in sub.tables]
    total = 1 << k
    best_val, best_idx = None, -1
    for start in range(0, total, CHUNK):
        _check(deadline)
        bits = bit_rows(k, start, min(CHUNK, total - start))
        val = bits @ c
        ok = (bits @ A.T <= rhs).all(axis=1)
        for pos, w, tv, tf in terms:
            idx = bits[:, pos] @ w
            val = val + tv[idx]
            ok &= tf[idx]
        if stats is not None:
            stats.nodes += len(bits)
        if not ok.any():
            continue
        masked = np.where(ok, val, NEG)
        i = int(np.argmax(masked))
        if best_val is None or masked[i] > best_val:
            best_val, best_idx = int(masked[i]), start + i
    if best_val is None:
        return None
    return best_val, tuple((best_idx >> (k - 1 - p)) & 1 for p in range(k))


def objective_bound(sub: LocalSubproblem):
    """Return ``bound(d, value, x)``: an upper bound on any completion of ``x[:d]``.

    ``value`` is the owned objective collected on ``x[:d]``.  Returns None when
    some table term has no feasible entry left.
    """
    k = len(sub.block)
    posrest = [0] * (k + 1)
    for p in range(k - 1, -1, -1):
        posrest[p] = posrest[p + 1] + max(0, sub.objective[p])
    terms = [(t.positions, [sum(1 for p in t.positions if p < d) for d in range(k + 1)], t.pyramid)
             for t in sub.tables]

    def bound(d, value, x):
        b = value + posrest[d]
        for pos, fixed, pyr in terms:
            L = fixed[d]
            pre = 0
            for p in pos[:L]:
                pre = (pre << 1) | x[p]
            mv = pyr[L][pre]
            if mv == NEG:
                return None
            b += mv
        return b

    return bound


def solve_local_bnb(sub: LocalSubproblem, node_budget: int = DEFAULT_NODE_BUDGET,
                    stats: SolveStats | None = None, deadline: Deadline | None = None):
    """Depth-first implicit enumeration over the block in ascending variable order.

    The bound adds every remaining positive objective coefficient and, for each
    table term, its best entry consistent with the variables fixed so far.
    A node is pruned when a constraint can no longer be satisfied even with the
    most favorable completion, or when its bound cannot beat the incumbent.
    """
    k = len(sub.block)
    c = list(sub.objective)
    m = len(sub.constraints)
    rows = [list(row) for row, _ in sub.constraints]
    rhs = [r for _, r in sub.constraints]
    incid = [[(i, rows[i][p]) for i in range(m) if rows[i][p]] for p in range(k)]
    # most favorable constraint usage still available from positions >= d
    negrest = [[0] * (k + 1) for _ in range(m)]
    for i in range(m):
        for p in range(k - 1, -1, -1):
            negrest[i][p] = negrest[i][p + 1] + min(0, rows[i][p])
    bound = objective_bound(sub)

    x = [0] * k
    lhs = [0] * m
    best = [None, None]
    nodes = 0

    def prunable(d, b):
        if b is None:
            return True
        if best[0] is None:
            return False
        return b < best[0] or (b == best[0] and x[:d] > best[1][:d])

    def dfs(d, value):
        nonlocal nodes
        for v in ((1, 0) if c[d] > 0 else (0, 1)):
            x[d] = v
            feasible = True
            for i, a in incid[d]:
                if v:
                    lhs[i] += a
                if lhs[i] + negrest[i][d + 1] > rhs[i]:
                    feasible = False
            if feasible:
                nv = value + c[d] * v
                b = bound(d + 1, nv, x)
                if not prunable(d + 1, b):
                    nodes += 1
                    if nodes > node_budget:
                        raise BudgetExhausted(f"node budget {node_budget} exhausted")
                    if deadline is not None and nodes & 4095 == 0:
                        deadline.check()
                    if d + 1 == k:
                        best[0], best[1] = b, list(x)
                    else:
                        dfs(d + 1, nv)
            if v:
                for i, a in incid[d]:
                    lhs[i] -= a
        x[d] = 0

    try:
        if any(negrest[i][0] > rhs[i] for i in range(m)):
            return None
        b = bound(0, 0, x)
        if b is None:
            return None
        nodes = 1
        if k == 0:
            return b, ()
        limit = sys.getrecursionlimit()
        if k + 100 > limit:
            sys.setrecursionlimit(k + 100)
        dfs(0, 0)
    finally:
        if stats is not None:
            stats.nodes += nodes
    if best[0] is None:
        return None
    return best[0], tuple(best[1])


def solve_package_per_entry(pkg: BlockPackage, solve, stats: SolveStats | None = None,
                            deadline: Deadline | None = None) -> LocalTable:
    """Build a block's table by solving each neighborhood assignment independently."""
    table = LocalTable.empty(pkg.block, pkg.neighborhood)
    for t in range(pkg.size):
        _check(deadline)
        table.set(t, solve(pkg.instantiate(t)))
        if stats is not None:
            stats.entries += 1
    return table


def solve_block_package(pkg: BlockPackage, cap: int = DEFAULT_CAP,
                        stats: SolveStats | None = None,
                        deadline: Deadline | None = None) -> LocalTable:
    """Build a block's whole table in one sweep over the block's assignments.

    Objective values and block-side constraint usage are computed once per
    block assignment; each neighborhood assignment then only changes the
    reduced right-hand sides and the slice of every consumed table.
    """
    kb, kn = len(pkg.block), len(pkg.neighborhood)
    if kb > cap:
        raise CapExceeded(f"block of {kb} variables exceeds enumeration cap {cap}")
    c = np.array(pkg.objective, dtype=np.int64).reshape(kb)
    Ab = _matrix([bc for bc, _, _ in pkg.constraints], kb)
    An = _matrix([nc for _, nc, _ in pkg.constraints], kn)
    rhs = np.array([r for _, _, r in pkg.constraints], dtype=np.int64)

    T = pkg.size
    nb_bits = bit_rows(kn)
    reduced = rhs[None, :] - nb_bits @ An.T  # (T, m)
    nb_idx = [nb_bits[:, list(np_)] @ np.left_shift(np.int64(1), ns) if np_ else np.zeros(T, np.int64)
              for _, np_, _, ns in pkg.layouts]

    best = np.full(T, NEG, dtype=np.int64)
    arg = np.full(T, -1, dtype=np.int64)
    total = 1 << kb
    for start in range(0, total, CHUNK):
        bits = bit_rows(kb, start, min(CHUNK, total - start))
        B = len(bits)
        base = bits @ c
        usage = bits @ Ab.T  # (B, m)
        b_idx = [bits[:, list(bp)] @ np.left_shift(np.int64(1), bs) if bp else np.zeros(B, np.int64)
                 for bp, _, bs, _ in pkg.layouts]
        step = max(1, _CELLS // B)
        for t0 in range(0, T, step):
            _check(deadline)
            rows = slice(t0, min(T, t0 + step))
            ok = (usage[None, :, :] <= reduced[rows, None, :]).all(axis=2)
            val = np.broadcast_to(base, ok.shape).copy()
            for comp, ni, bi in zip(pkg.components, nb_idx, b_idx):
                idx = ni[rows, None] + bi[None, :]
                val += comp.values[idx]
                ok &= comp.feasible[idx]
            masked = np.where(ok, val, NEG)
            j = np.argmax(masked, axis=1)
            v = masked[np.arange(len(j)), j]
            better = (v > best[rows]) & ok.any(axis=1)
            best[rows] = np.where(better, v, best[rows])
            arg[rows] = np.where(better, start + j, arg[rows])
        if stats is not None:
            stats.nodes += B
    if stats is not None:
        stats.entries += T
    table = LocalTable.empty(pkg.block, pkg.neighborhood)
    table.feasible[:] = arg >= 0
    table.values[:] = np.where(table.feasible, best, 0)
    table.optima[:] = arg
    return table


@dataclass(frozen=True)
class LocalSolver:
    """Strategy and limits for the block subproblems of an elimination run."""

    strategy: str = BNB
    package: bool = False
    node_budget: int = DEFAULT_NODE_BUDGET
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")

    def solve(self, sub: LocalSubproblem, stats=None, deadline=None):
        if self.strategy == EXHAUSTIVE:
            return solve_local_exhaustive(sub, self.cap, stats, deadline)
        return solve_local_bnb(sub, self.node_budget, stats, deadline)

    def table(self, pkg: BlockPackage, stats=None, deadline=None) -> LocalTable:
        if self.package:
            return solve_block_package(pkg, self.cap, stats, deadline)
        return solve_package_per_entry(
            pkg, lambda sub: self.solve(sub, stats, deadline), stats, deadline)


def whole_problem(instance: IlpInstance) -> LocalSubproblem:
    block = tuple(range(instance.n))
    rows = []
    for con in instance.constraints:
        row = [0] * instance.n
        for j, a in con.support:
            row[j] = a
        rows.append((tuple(row), con.rhs))
    return LocalSubproblem(block, instance.objective, tuple(rows))


def solve_monolithic(instance: IlpInstance, strategy: str = BNB, cap: int = DEFAULT_CAP,
                     node_budget: int = DEFAULT_NODE_BUDGET, timeout: float | None = None,
                     deadline: Deadline | None = None) -> Solution:
    """Solve the instance as one block; with EXHAUSTIVE this is the brute-force oracle."""
    stats = SolveStats()
    if deadline is None:
        deadline = Deadline(timeout)
    t0 = time.perf_counter()
    sub = whole_problem(instance)
    if strategy == EXHAUSTIVE:
        res = solve_local_exhaustive(sub, cap, stats, deadline)
    elif strategy == BNB:
        res = solve_local_bnb(sub, node_budget, stats, deadline)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    stats.seconds = time.perf_counter() - t0
    if res is None:
        return Solution(INFEASIBLE, stats=stats)
    return Solution(OPTIMAL, res[1], res[0], stats)
