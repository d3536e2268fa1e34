import itertools

import numpy as np
import pytest

from blocklea.model import Constraint, IlpInstance
from blocklea.subsolver import (BudgetExhausted, CapExceeded, Deadline, LocalSolver, SolveTimeout,
                                objective_bound, solve_block_package, solve_local_bnb,
                                solve_local_exhaustive, solve_monolithic, solve_package_per_entry)
from blocklea.model import SolveStats
from blocklea.tables import BlockPackage, LocalSubproblem, TableComponent

from .helpers import brute_force, brute_local, random_instance, random_package

# block {x5} with neighborhood {x2}: max 4 x5  s.t.  2 x2 + 3 x5 <= 4
PKG1 = BlockPackage((4,), (1,), (4,), (((3,), (2,), 4),))
H1 = TableComponent((1,), np.array([4, 0]), np.array([True, True]), 0)
# block {x1, x2, x4} with neighborhood {x3}, absorbing the table above
PKG2 = BlockPackage((0, 1, 3), (2,), (2, 3, 5),
                    (((3, 4, 0), (1,), 6), ((0, 2, 3), (3,), 5)), (H1,))


def test_first_table_rows():
    assert solve_local_exhaustive(PKG1.instantiate(0)) == (4, (1,))
    assert solve_local_exhaustive(PKG1.instantiate(1)) == (0, (0,))


def test_second_table_rows():
    assert solve_local_exhaustive(PKG2.instantiate(1)) == (6, (1, 0, 0))
    assert solve_local_bnb(PKG2.instantiate(1)) == (6, (1, 0, 0))


def test_bnb_prunes_on_second_table():
    stats = SolveStats()
    assert solve_local_bnb(PKG2.instantiate(0), stats=stats) == (11, (1, 0, 1))
    assert stats.nodes < 2**3


def test_negative_coefficient_takes_zero():
    sub = LocalSubproblem((0,), (-7,))
    assert solve_local_exhaustive(sub) == (0, (0,))
    assert solve_local_bnb(sub) == (0, (0,))


def test_infeasible_subproblem():
    # x1 + x2 >= 1 written as -x1 - x2 <= -1, with x1 forced off by x1 <= 0
    sub = LocalSubproblem((0, 1), (1, 1), (((-1, -1), -1), ((1, 0), 0), ((0, 1), 0)))
    assert solve_local_exhaustive(sub) is None
    assert solve_local_bnb(sub) is None


def test_ties_pick_lexicographically_smallest():
    sub = LocalSubproblem((0, 1, 2), (1, 1, 1), (((1, 1, 1), 1),))
    assert solve_local_exhaustive(sub) == (1, (0, 0, 1))
    assert solve_local_bnb(sub) == (1, (0, 0, 1))


def test_exhaustive_cap():
    with pytest.raises(CapExceeded):
        solve_local_exhaustive(LocalSubproblem(tuple(range(5)), (1,) * 5), cap=4)


def test_bnb_budget_is_an_error_not_an_answer():
    sub = LocalSubproblem(tuple(range(12)), tuple(range(1, 13)), ((tuple(range(1, 13)), 40),))
    with pytest.raises(BudgetExhausted):
        solve_local_bnb(sub, node_budget=5)


def test_deadline_stops_bnb():
    inst = IlpInstance(40, (1,) * 40, (Constraint(tuple((j, 2 + j % 3) for j in range(40)), 45),))
    with pytest.raises(SolveTimeout):
        solve_monolithic(inst, deadline=Deadline(0.0))


@pytest.mark.parametrize("seed", range(200))
def test_strategies_agree_with_enumeration(seed):
    rng = np.random.default_rng(seed)
    pkg = random_package(rng, max_block=8)
    for t in range(pkg.size):
        sub = pkg.instantiate(t)
        expect = brute_local(sub)
        assert solve_local_exhaustive(sub) == expect
        assert solve_local_bnb(sub) == expect


@pytest.mark.parametrize("seed", range(60))
def test_bound_is_admissible(seed):
    rng = np.random.default_rng(1000 + seed)
    pkg = random_package(rng, max_block=6)
    sub = pkg.instantiate(int(rng.integers(0, pkg.size)))
    bound = objective_bound(sub)
    k = len(sub.block)
    for d in range(k + 1):
        for prefix in itertools.product((0, 1), repeat=d):
            x = list(prefix) + [0] * (k - d)
            value = sum(c * v for c, v in zip(sub.objective, prefix))
            best = None
            for rest in itertools.product((0, 1), repeat=k - d):
                bits = prefix + rest
                total = sum(c * v for c, v in zip(sub.objective, bits))
                ok = True
                for t in sub.tables:
                    idx = int("".join(str(bits[p]) for p in t.positions) or "0", 2)
                    ok = ok and bool(t.feasible[idx])
                    total += int(t.values[idx])
                if ok and (best is None or total > best):
                    best = total
            b = bound(d, value, x)
            if best is not None:
                assert b is not None and b >= best


@pytest.mark.parametrize("seed", range(100))
def test_package_matches_per_entry(seed):
    rng = np.random.default_rng(5000 + seed)
    pkg = random_package(rng)
    swept = solve_block_package(pkg)
    for strategy in ("exhaustive", "bnb"):
        solver = LocalSolver(strategy)
        assert swept.same_as(solve_package_per_entry(pkg, solver.solve))


def test_package_covers_second_table_in_one_sweep():
    table = solve_block_package(PKG2)
    assert table.entry(0) == (11, (1, 0, 1))
    assert table.entry(1) == (6, (1, 0, 0))


def test_package_with_empty_neighborhood():
    pkg = BlockPackage((0, 1), (), (3, -1), (((2, 2), (), 3),))
    table = solve_block_package(pkg)
    assert len(table) == 1
    assert table.entry(0) == solve_local_exhaustive(pkg.instantiate(0)) == (3, (1, 0))


def test_monolithic_example(example):
    for strategy in ("exhaustive", "bnb"):
        sol = solve_monolithic(example, strategy)
        assert sol.status == "optimal" and sol.objective == 18
        assert sol.x == (1, 0, 0, 1, 1, 1, 1)


def test_monolithic_infeasible():
    inst = IlpInstance(1, (1,), (Constraint(((0, 1),), -1),))
    assert solve_monolithic(inst, "exhaustive").status == "infeasible"
    assert solve_monolithic(inst, "bnb").status == "infeasible"


@pytest.mark.parametrize("seed", range(40))
def test_monolithic_matches_brute_force(seed):
    inst = random_instance(np.random.default_rng(seed), max_n=12)
    expect = brute_force(inst)
    for strategy in ("exhaustive", "bnb"):
        sol = solve_monolithic(inst, strategy)
        assert (sol.status, sol.objective) == expect
