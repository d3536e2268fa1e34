import numpy as np
import pytest

from blocklea.elimination import (PartitionError, WidthLimitError, backward, forward, solve_lea,
                                  table_width_report)
from blocklea.generator import GeneratorParams, generate, staircase_partition
from blocklea.graph import OrderedPartition
from blocklea.model import Constraint, IlpInstance, evaluate
from blocklea.subsolver import LocalSolver, solve_monolithic

from .helpers import brute_force, random_instance, random_partition

SOLVERS = [LocalSolver("exhaustive"), LocalSolver("bnb"), LocalSolver("bnb", package=True)]


@pytest.mark.parametrize("solver", SOLVERS, ids=["exhaustive", "bnb", "package"])
def test_worked_example_tables(example, example_partition, solver):
    rec = forward(example, example_partition, solver)
    t1, t2, t3, t4 = rec.tables
    assert t1.neighborhood == (1,)
    assert [t1.entry(0), t1.entry(1)] == [(4, (1,)), (0, (0,))]
    assert t2.neighborhood == (2,)
    assert [t2.entry(0), t2.entry(1)] == [(11, (1, 0, 1)), (6, (1, 0, 0))]
    assert t3.neighborhood == (2,)
    assert [t3.entry(0), t3.entry(1)] == [(18, (1, 1)), (12, (1, 0))]
    assert t4.neighborhood == () and t4.entry(0) == (18, (0,))
    assert rec.final_value == 18
    assert backward(rec) == (1, 0, 0, 1, 1, 1, 1)


def test_table_dump_layout(example, example_partition):
    dump = forward(example, example_partition).tables[1].format()
    assert dump.splitlines()[1:] == ["x3 | h | x1 x2 x4", "0 | 11 | 1 0 1", "1 | 6 | 1 0 0"]


def test_trace_keeps_graph_sequence(example, example_partition):
    rec = forward(example, example_partition, trace=True)
    assert [len(g.alive) for g in rec.graphs] == [7, 6, 3, 1, 0]


def test_single_negative_variable():
    inst = IlpInstance(1, (-3,))
    sol = solve_lea(inst, OrderedPartition.of([[0]]))
    assert (sol.status, sol.objective, sol.x) == ("optimal", 0, (0,))


def test_infeasible_instance():
    inst = IlpInstance(2, (1, 1), (Constraint(((0, 1),), -1),))
    sol = solve_lea(inst, OrderedPartition.of([[1], [0]]))
    assert sol.status == "infeasible" and sol.x is None
    rec = forward(inst, OrderedPartition.of([[0], [1]]))
    with pytest.raises(ValueError):
        backward(rec)


def test_disconnected_components_fold_constants():
    # two independent pieces: constant tables from the first must reach the final value
    inst = IlpInstance(4, (3, 2, 5, -1), (Constraint(((0, 2), (1, 2)), 2), Constraint(((2, 1), (3, 1)), 1)))
    for order in ([[0, 1], [2, 3]], [[2], [0], [3], [1]], [[0], [1], [2], [3]]):
        sol = solve_lea(inst, OrderedPartition.of(order))
        assert sol.objective == 8 and evaluate(inst, sol.x) == (True, 8)


def test_single_block_record():
    inst = IlpInstance(3, (1, 2, 3), (Constraint(((0, 1), (1, 1), (2, 1)), 2),))
    rec = forward(inst, OrderedPartition.of([[0, 1, 2]]))
    assert len(rec.tables) == 1
    assert backward(rec) == rec.tables[0].entry(0)[1] == (0, 1, 1)


def test_invalid_partition_rejected(example):
    with pytest.raises(PartitionError, match="coverage"):
        forward(example, OrderedPartition.of([[0, 1, 2]]))


def test_width_cap(example, example_partition):
    with pytest.raises(WidthLimitError):
        forward(example, OrderedPartition.of([[2], [0, 1, 3, 4, 5, 6]]), width_cap=3)


def test_width_report(example, example_partition):
    widths = [(w, size) for _, w, size in table_width_report(example, example_partition)]
    assert widths == [(1, 2), (1, 2), (1, 2), (0, 1)]
    edgeless = IlpInstance(3, (1, 1, 1))
    assert [w for _, w, _ in table_width_report(edgeless, OrderedPartition.of([[0], [1], [2]]))] == [0, 0, 0]


def test_width_report_on_staircase():
    inst = generate(GeneratorParams(48, 12, 6, 2, seed=3))
    assert [w for _, w, _ in table_width_report(inst, staircase_partition(inst.meta))] == [2, 2, 2, 2, 2, 0]


@pytest.mark.parametrize("seed", range(60))
def test_matches_brute_force_and_backward_is_consistent(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, max_n=10)
    part = random_partition(rng, inst.n)
    expect = brute_force(inst)
    for solver in SOLVERS:
        rec = forward(inst, part, solver)
        if expect[0] == "infeasible":
            assert not rec.feasible
            continue
        assert rec.final_value == expect[1]
        assert evaluate(inst, backward(rec)) == (True, rec.final_value)


@pytest.mark.parametrize("seed", range(30))
def test_singleton_partition_matches_monolithic(seed):
    inst = random_instance(np.random.default_rng(700 + seed), max_n=12)
    sol = solve_lea(inst, OrderedPartition.of([v] for v in range(inst.n)))
    mono = solve_monolithic(inst, "exhaustive")
    assert (sol.status, sol.objective) == (mono.status, mono.objective)


@pytest.mark.parametrize("seed", range(40))
def test_consumption_and_scope_conservation(seed):
    rng = np.random.default_rng(900 + seed)
    inst = random_instance(rng, max_n=12)
    part = random_partition(rng, inst.n)
    rec = forward(inst, part)
    used = [i for t in rec.tables for i in t.constraints_used]
    assert sorted(used) == list(range(inst.m))
    for i in used:
        first = next(j for j, b in enumerate(part.blocks) if set(b) & set(inst.constraints[i].variables))
        assert i in rec.tables[first].constraints_used
    consumed = [o for t in rec.tables for o in t.consumed]
    assert sorted(consumed) == list(range(len(part) - 1))
    eliminated = set()
    for t in rec.tables:
        assert not set(t.neighborhood) & (eliminated | set(t.block))
        eliminated |= set(t.block)
    assert rec.tables[-1].neighborhood == ()


@pytest.mark.parametrize("seed", range(30))
def test_partition_invariance(seed):
    rng = np.random.default_rng(1300 + seed)
    inst = random_instance(rng, max_n=12)
    a = solve_lea(inst, random_partition(rng, inst.n))
    b = solve_lea(inst, random_partition(rng, inst.n))
    assert (a.status, a.objective) == (b.status, b.objective)
