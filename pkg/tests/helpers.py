import itertools
from pathlib import Path

import numpy as np

from blocklea.graph import OrderedPartition
from blocklea.model import Constraint, IlpInstance, evaluate

DATA = Path(__file__).parent / "data"


def X(*vs):
    """1-based variable numbers to a 0-based set."""
    return {v - 1 for v in vs}


def brute_force(instance):
    """(status, objective) by plain enumeration; independent of the solver code."""
    best = None
    for x in itertools.product((0, 1), repeat=instance.n):
        ok, val = evaluate(instance, x)
        if ok and (best is None or val > best):
            best = val
    return ("infeasible", None) if best is None else ("optimal", best)


def random_instance(rng, n=None, max_n=16, coeff=10):
    n = n or int(rng.integers(1, max_n + 1))
    m = int(rng.integers(0, n + 1))
    cons = []
    for _ in range(m):
        size = int(rng.integers(1, min(n, 4) + 1))
        support = sorted(rng.choice(n, size=size, replace=False).tolist())
        coeffs = rng.integers(-coeff, coeff + 1, size=size).tolist()
        rhs = int(rng.integers(-3, 3 * coeff))
        cons.append(Constraint(tuple(zip(support, coeffs)), rhs))
    obj = tuple(rng.integers(-coeff, coeff + 1, size=n).tolist())
    return IlpInstance(n, obj, tuple(cons))


def random_partition(rng, n):
    order = rng.permutation(n).tolist()
    cuts = sorted(rng.choice(np.arange(1, n), size=int(rng.integers(0, n)), replace=False).tolist()) if n > 1 else []
    bounds = [0] + cuts + [n]
    return OrderedPartition.of(order[a:b] for a, b in zip(bounds, bounds[1:]))


def random_package(rng, max_block=10, max_nb=4, infeasible_rate=0.15):
    """A block subproblem family with random rows and random consumed tables."""
    from blocklea.tables import BlockPackage, TableComponent

    kb = int(rng.integers(1, max_block + 1))
    kn = int(rng.integers(0, max_nb + 1))
    vars_ = rng.permutation(kb + kn + 3)[: kb + kn].tolist()
    block, nb = tuple(sorted(vars_[:kb])), tuple(sorted(vars_[kb:]))
    objective = tuple(rng.integers(-10, 11, size=kb).tolist())
    rows = []
    for _ in range(int(rng.integers(0, 4))):
        bc = tuple((rng.integers(-10, 11, size=kb) * (rng.random(kb) < 0.7)).tolist())
        nc = tuple((rng.integers(-10, 11, size=kn) * (rng.random(kn) < 0.7)).tolist())
        rows.append((bc, nc, int(rng.integers(-5, 30))))
    comps = []
    pool = list(block + nb)
    for origin in range(int(rng.integers(0, 3))):
        size = int(rng.integers(0, min(4, len(pool)) + 1))
        scope = tuple(sorted(rng.choice(pool, size=size, replace=False).tolist()))
        vals = rng.integers(-20, 21, size=1 << size).astype(np.int64)
        feas = rng.random(1 << size) >= infeasible_rate
        comps.append(TableComponent(scope, vals, feas, origin))
    return BlockPackage(block, nb, objective, tuple(rows), tuple(comps))


def brute_local(sub):
    """Best (value, bits) of a subproblem by plain enumeration, lexicographic tie-break."""
    best = None
    for bits in itertools.product((0, 1), repeat=len(sub.block)):
        if any(sum(a * x for a, x in zip(row, bits)) > rhs for row, rhs in sub.constraints):
            continue
        val = sum(c * x for c, x in zip(sub.objective, bits))
        ok = True
        for t in sub.tables:
            idx = 0
            for p in t.positions:
                idx = (idx << 1) | bits[p]
            if not t.feasible[idx]:
                ok = False
                break
            val += int(t.values[idx])
        if ok and (best is None or val > best[0]):
            best = (val, bits)
    return best
