"""Interaction graphs, block elimination, ordered partitions and quotient graphs."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .model import IlpInstance, ParseError


class InteractionGraph:
    """Undirected graph over variables 0..n-1 with an alive mask.

    ``adj[v]`` only ever holds alive vertices; eliminated vertices keep an
    empty neighbor set.
    """

    def __init__(self, n: int, edges=()):
        self.n = n
        self.adj: list[set[int]] = [set() for _ in range(n)]
        self.alive: set[int] = set(range(n))
        for u, v in edges:
            self.add_edge(u, v)

    def add_edge(self, u: int, v: int) -> None:
        if u == v:
            return
        self.adj[u].add(v)
        self.adj[v].add(u)

    def add_clique(self, vertices) -> None:
        for u, v in combinations(vertices, 2):
            self.add_edge(u, v)

    def copy(self) -> InteractionGraph:
        g = InteractionGraph.__new__(InteractionGraph)
        g.n = self.n
        g.adj = [set(a) for a in self.adj]
        g.alive = set(self.alive)
        return g

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u in self.alive for v in self.adj[u] if u < v)

    def neighbors(self, v: int) -> list[int]:
        return sorted(self.adj[v])

    def __repr__(self):
        return f"InteractionGraph(n={self.n}, alive={len(self.alive)}, edges={len(self.edges())})"


def build_interaction_graph(instance: IlpInstance) -> InteractionGraph:
    g = InteractionGraph(instance.n)
    for con in instance.constraints:
        g.add_clique(con.variables)
    return g


def block_neighborhood(graph: InteractionGraph, block) -> set[int]:
    block = set(block)
    dead = block - graph.alive
    if dead:
        raise ValueError(f"block contains eliminated vertices {sorted(dead)}")
    nb = set()
    for v in block:
        nb |= graph.adj[v]
    return nb - block


def eliminate_block(graph: InteractionGraph, block, inplace: bool = False) -> InteractionGraph:
    """Turn the block's neighborhood into a clique and remove the block."""
    g = graph if inplace else graph.copy()
    nb = block_neighborhood(g, block)
    g.add_clique(sorted(nb))
    for v in block:
        for u in g.adj[v]:
            g.adj[u].discard(v)
        g.adj[v] = set()
        g.alive.discard(v)
    return g


@dataclass(frozen=True)
class OrderedPartition:
    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, blocks) -> OrderedPartition:
        return cls(tuple(tuple(sorted(b)) for b in blocks))

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)


def validate_partition(partition: OrderedPartition, n: int) -> str | None:
    """Return None if ``partition`` covers 0..n-1 disjointly with nonempty blocks,
    otherwise a message describing the first violation found."""
    seen = {}
    for i, block in enumerate(partition.blocks):
        if not block:
            return f"block {i + 1} is empty"
        for v in block:
            if not 0 <= v < n:
                return f"variable x{v + 1} in block {i + 1} is out of range 1..{n}"
            if v in seen:
                return f"overlap: variable x{v + 1} is in blocks {seen[v] + 1} and {i + 1}"
            seen[v] = i
    missing = [v for v in range(n) if v not in seen]
    if missing:
        return f"coverage: variable x{missing[0] + 1} is in no block"
    return None


@dataclass(frozen=True)
class QuotientGraph:
    p: int
    edges: frozenset[tuple[int, int]]


def quotient_graph(graph: InteractionGraph, partition: OrderedPartition) -> QuotientGraph:
    covered = {v for b in partition.blocks for v in b}
    if covered != graph.alive or sum(map(len, partition.blocks)) != len(covered) \
            or not all(partition.blocks):
        raise ValueError("partition does not split the alive vertices")
    owner = {v: i for i, b in enumerate(partition.blocks) for v in b}
    edges = set()
    for u, v in graph.edges():
        i, k = owner[u], owner[v]
        if i != k:
            edges.add((min(i, k), max(i, k)))
    return QuotientGraph(len(partition.blocks), frozenset(edges))


def find_indistinguishable_blocks(graph: InteractionGraph) -> OrderedPartition:
    """Group alive vertices with identical closed neighborhoods."""
    groups: dict[frozenset, list[int]] = {}
    for v in sorted(graph.alive):
        groups.setdefault(frozenset(graph.adj[v] | {v}), []).append(v)
    return OrderedPartition(tuple(sorted(tuple(g) for g in groups.values())))


# -- partition files and DOT --------------------------------------------------


def parse_partition(text: str, n: int | None = None) -> OrderedPartition:
    blocks = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        if line[0] != "block" or len(line) < 2:
            raise ParseError("expected 'block <v1> <v2> ...'", no)
        try:
            blocks.append([int(t) - 1 for t in line[1:]])
        except ValueError:
            raise ParseError("block members must be integers", no) from None
    partition = OrderedPartition.of(blocks)
    if n is not None:
        problem = validate_partition(partition, n)
        if problem:
            raise ParseError(f"invalid partition: {problem}")
    return partition


def serialize_partition(partition: OrderedPartition) -> str:
    return "".join("block " + " ".join(str(v + 1) for v in b) + "\n" for b in partition.blocks)


def to_dot(graph: InteractionGraph | QuotientGraph, name: str = "G") -> str:
    if isinstance(graph, QuotientGraph):
        nodes = [f"X{i + 1}" for i in range(graph.p)]
        edges = sorted(graph.edges)
        label = lambda i: f"X{i + 1}"  # noqa: E731
    else:
        nodes = [f"x{v + 1}" for v in sorted(graph.alive)]
        edges = graph.edges()
        label = lambda v: f"x{v + 1}"  # noqa: E731
    out = [f"graph {name} {{"]
    out += [f"  {v};" for v in nodes]
    out += [f"  {label(u)} -- {label(v)};" for u, v in edges]
    out.append("}")
    return "\n".join(out) + "\n"
