"""Seeded staircase (quasi-block) instance generator and its canonical partition.

The random stream is splitmix64 and values are drawn by plain modulo
reduction ``lo + out % (hi - lo + 1)``; both are part of the output format,
so the same parameters give byte-identical files everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graph import OrderedPartition
from .model import Constraint, IlpInstance, StaircaseMeta

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance the state and return ``(new_state, output)``."""
    state = (state + GOLDEN) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state, out = splitmix64_next(self.state)
        return out

    def uniform(self, lo: int, hi: int) -> int:
        return lo + self.next() % (hi - lo + 1)


@dataclass(frozen=True)
class GeneratorParams:
    n: int
    m: int
    k: int
    b: int
    seed: int = 0
    coeff_range: tuple[int, int] = (1, 10)
    rhs_factor: Fraction = Fraction(3, 5)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.n % self.k:
            raise ValueError(f"k={self.k} does not divide n={self.n}")
        if self.m % self.k:
            raise ValueError(f"k={self.k} does not divide m={self.m}")
        if not 0 <= self.b < self.n // self.k:
            raise ValueError(f"need 0 <= b < n/k, got b={self.b}, n/k={self.n // self.k}")
        lo, hi = self.coeff_range
        if lo > hi:
            raise ValueError("empty coefficient range")
        if not 0 < Fraction(self.rhs_factor) < 1:
            raise ValueError("rhs_factor must lie strictly between 0 and 1")
        if not 0 <= self.seed <= MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")


def generate(params: GeneratorParams) -> IlpInstance:
    """Staircase instance: each block's rows cover the block plus the previous block's separator."""
    n, k, b = params.n, params.k, params.b
    size, rows_per_block = n // k, params.m // k
    lo, hi = params.coeff_range
    factor = Fraction(params.rhs_factor)
    rng = SplitMix64(params.seed)

    objective = tuple(rng.uniform(lo, hi) for _ in range(n))
    constraints = []
    for blk in range(k):
        start = blk * size
        support = list(range(start - b, start)) if blk > 0 else []
        support += range(start, start + size)
        for _ in range(rows_per_block):
            coeffs = [rng.uniform(lo, hi) for _ in support]
            rhs = (factor.numerator * sum(coeffs)) // factor.denominator
            constraints.append(Constraint(tuple(zip(support, coeffs)), rhs))
    meta = StaircaseMeta(k, b, tuple(size * (i + 1) for i in range(k)))
    return IlpInstance(n, objective, tuple(constraints), meta)


def staircase_partition(meta: StaircaseMeta) -> OrderedPartition:
    """Blocks shifted so each one starts with the previous block's separator.

    Eliminated in order, every block then sees exactly its own separator as
    neighborhood, and the last block none.
    """
    ranges = meta.ranges
    blocks = []
    for i, r in enumerate(ranges):
        own = list(r) if i == meta.k - 1 else list(r)[: len(r) - meta.b]
        head = list(meta.separator(i - 1)) if i > 0 else []
        blocks.append(head + own)
    return OrderedPartition.of(blocks)
