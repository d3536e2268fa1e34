"""Tabular functions produced and consumed during block elimination.

Every table is a dense array indexed by the packed bit pattern of an
assignment to a sorted variable tuple.  The first (smallest) variable is the
most significant bit, so index order is lexicographic order of assignments.
Infeasible entries are flagged in a parallel boolean mask.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

NEG = np.iinfo(np.int64).min


def unpack(index: int, width: int) -> tuple[int, ...]:
    return tuple((index >> (width - 1 - i)) & 1 for i in range(width))


def pack(bits) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | b
    return out


def bit_rows(width: int, start: int = 0, count: int | None = None) -> np.ndarray:
    """Rows ``start .. start+count-1`` of the lexicographic 0/1 enumeration."""
    if count is None:
        count = (1 << width) - start
    idx = np.arange(start, start + count, dtype=np.int64)
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] >> shifts[None, :]) & 1


def weights(width: int) -> np.ndarray:
    return np.left_shift(np.int64(1), np.arange(width - 1, -1, -1, dtype=np.int64))


@dataclass(frozen=True, eq=False)
class TableComponent:
    """An additive objective term ``h(scope)`` left behind by an eliminated block."""

    scope: tuple[int, ...]
    values: np.ndarray
    feasible: np.ndarray
    origin: int

    def entry(self, index: int) -> int | None:
        return int(self.values[index]) if self.feasible[index] else None


@dataclass(frozen=True, eq=False)
class TableTerm:
    """A table component restricted to block positions (other scope variables fixed)."""

    positions: tuple[int, ...]
    values: np.ndarray
    feasible: np.ndarray

    @cached_property
    def pyramid(self) -> list[list[int]]:
        """``pyramid[L][p]``: best entry among those whose first L bits equal p.

        NEG marks an all-infeasible range.
        """
        level = np.where(self.feasible, self.values, NEG)
        levels = [level]
        while level.size > 1:
            level = level.reshape(-1, 2).max(axis=1)
            levels.append(level)
        return [lv.tolist() for lv in reversed(levels)]


@dataclass(frozen=True, eq=False)
class LocalSubproblem:
    """One block subproblem with its neighborhood fixed.

    ``constraints`` are dense over the block with the neighborhood's
    contribution already moved to the right-hand side.
    """

    block: tuple[int, ...]
    objective: tuple[int, ...]
    constraints: tuple[tuple[tuple[int, ...], int], ...] = ()
    tables: tuple[TableTerm, ...] = ()
    fixed: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True, eq=False)
class BlockPackage:
    """All subproblems of one block: they differ only in their right-hand sides
    (and in which slice of each consumed table applies)."""

    block: tuple[int, ...]
    neighborhood: tuple[int, ...]
    objective: tuple[int, ...]
    # (coefficients over block, coefficients over neighborhood, rhs)
    constraints: tuple[tuple[tuple[int, ...], tuple[int, ...], int], ...] = ()
    components: tuple[TableComponent, ...] = ()

    def __post_init__(self):
        if set(self.block) & set(self.neighborhood):
            raise ValueError("block and neighborhood overlap")
        known = set(self.block) | set(self.neighborhood)
        for comp in self.components:
            if not set(comp.scope) <= known:
                raise ValueError(f"component scope {comp.scope} leaves block and neighborhood")

    @property
    def size(self) -> int:
        return 1 << len(self.neighborhood)

    @cached_property
    def layouts(self) -> list[tuple[tuple[int, ...], tuple[int, ...], np.ndarray, np.ndarray]]:
        """Per component: (block positions, nb positions, block shifts, nb shifts)."""
        bpos = {v: i for i, v in enumerate(self.block)}
        npos = {v: i for i, v in enumerate(self.neighborhood)}
        out = []
        for comp in self.components:
            r = len(comp.scope)
            bp, bs, np_, ns = [], [], [], []
            for rank, v in enumerate(comp.scope):
                shift = r - 1 - rank
                if v in bpos:
                    bp.append(bpos[v])
                    bs.append(shift)
                else:
                    np_.append(npos[v])
                    ns.append(shift)
            out.append((tuple(bp), tuple(np_), np.array(bs, dtype=np.int64),
                        np.array(ns, dtype=np.int64)))
        return out

    def nb_values(self, t: int) -> tuple[int, ...]:
        return unpack(t, len(self.neighborhood))

    def instantiate(self, t: int) -> LocalSubproblem:
        """The subproblem for neighborhood assignment number ``t``."""
        nbv = self.nb_values(t)
        cons = tuple((bc, rhs - sum(a * x for a, x in zip(nc, nbv)))
                     for bc, nc, rhs in self.constraints)
        terms = []
        for comp, (bp, np_, bs, ns) in zip(self.components, self.layouts):
            base = sum(nbv[p] << int(s) for p, s in zip(np_, ns))
            offsets = bit_rows(len(bp)) @ np.left_shift(np.int64(1), bs) if bp else np.zeros(1, np.int64)
            idx = base + offsets
            terms.append(TableTerm(bp, comp.values[idx], comp.feasible[idx]))
        return LocalSubproblem(self.block, self.objective, cons, tuple(terms),
                               tuple(zip(self.neighborhood, nbv)))


@dataclass(eq=False)
class LocalTable:
    """Result of eliminating one block: h-values and local optima per neighborhood assignment."""

    block: tuple[int, ...]
    neighborhood: tuple[int, ...]
    values: np.ndarray
    feasible: np.ndarray
    optima: np.ndarray  # packed block bits, -1 where infeasible
    constraints_used: tuple[int, ...] = ()
    consumed: tuple[int, ...] = ()
    origin: int = 0
    extra: dict = field(default_factory=dict)

    @classmethod
    def empty(cls, block, neighborhood, **kw) -> LocalTable:
        size = 1 << len(neighborhood)
        return cls(tuple(block), tuple(neighborhood), np.zeros(size, np.int64),
                   np.zeros(size, bool), np.full(size, -1, np.int64), **kw)

    def __len__(self):
        return len(self.values)

    def entry(self, t: int) -> tuple[int, tuple[int, ...]] | None:
        if not self.feasible[t]:
            return None
        return int(self.values[t]), unpack(int(self.optima[t]), len(self.block))

    def set(self, t: int, result) -> None:
        if result is None:
            self.feasible[t] = False
            self.optima[t] = -1
            self.values[t] = 0
        else:
            h, bits = result
            self.values[t] = h
            self.feasible[t] = True
            self.optima[t] = pack(bits)

    def lookup(self, x) -> tuple[int, tuple[int, ...]] | None:
        """Entry selected by the neighborhood values found in assignment ``x``."""
        return self.entry(pack(x[v] for v in self.neighborhood))

    def as_component(self) -> TableComponent:
        return TableComponent(self.neighborhood, self.values.copy(), self.feasible.copy(), self.origin)

    def same_as(self, other: LocalTable) -> bool:
        return (self.block == other.block and self.neighborhood == other.neighborhood
                and np.array_equal(self.feasible, other.feasible)
                and np.array_equal(np.where(self.feasible, self.values, 0),
                                   np.where(other.feasible, other.values, 0))
                and np.array_equal(self.optima, other.optima))

    def format(self, title: str | None = None) -> str:
        """Text dump laid out like a hand-computed elimination table."""
        name = lambda v: f"x{v + 1}"  # noqa: E731
        nb = " ".join(map(name, self.neighborhood)) or "-"
        blk = " ".join(map(name, self.block))
        lines = [title or f"table {self.origin + 1}: block {{{blk}}} neighborhood {{{nb}}}",
                 f"{nb} | h | {blk}"]
        for t in range(len(self)):
            nbv = " ".join(map(str, unpack(t, len(self.neighborhood)))) or "-"
            e = self.entry(t)
            if e is None:
                lines.append(f"{nbv} | infeasible | -")
            else:
                lines.append(f"{nbv} | {e[0]} | {' '.join(map(str, e[1]))}")
        return "\n".join(lines) + "\n"
