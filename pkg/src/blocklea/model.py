"""Binary ILP instances, assignments, solutions and their text formats.

Instances are maximization problems ``max c.x  s.t.  A x <= b,  x in {0,1}^n``.
Files use 1-based variable indices; everything in memory is 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field

INT64_MAX = 2**63 - 1

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"


class ParseError(ValueError):
    """Malformed instance, solution or partition text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Constraint:
    """A single ``sum a_j x_j <= rhs`` row; ``support`` holds sorted (j, a_j)."""

    support: tuple[tuple[int, int], ...]
    rhs: int

    def __post_init__(self):
        if not self.support:
            raise ValueError("constraint support is empty")
        idx = [j for j, _ in self.support]
        if any(a >= b for a, b in zip(idx, idx[1:])):
            raise ValueError("constraint support indices must be strictly increasing")

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(j for j, _ in self.support)

    def lhs(self, x) -> int:
        return sum(a * x[j] for j, a in self.support)


@dataclass(frozen=True)
class StaircaseMeta:
    """Staircase layout: ``k`` consecutive equal blocks coupled by ``b`` separator variables.

    ``ends`` are the exclusive 0-based end indices of the blocks; the file
    header stores them 1-based inclusive, which is the same number.
    """

    k: int
    b: int
    ends: tuple[int, ...]

    def __post_init__(self):
        if len(self.ends) != self.k:
            raise ValueError(f"meta lists {len(self.ends)} block ends, expected k={self.k}")

    @property
    def ranges(self) -> list[range]:
        starts = (0,) + self.ends[:-1]
        return [range(s, e) for s, e in zip(starts, self.ends)]

    def separator(self, i: int) -> range:
        r = self.ranges[i]
        return range(r.stop - self.b, r.stop)


@dataclass(frozen=True)
class IlpInstance:
    n: int
    objective: tuple[int, ...]
    constraints: tuple[Constraint, ...] = ()
    meta: StaircaseMeta | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("instance needs at least one variable")
        if len(self.objective) != self.n:
            raise ValueError(f"objective has {len(self.objective)} coefficients, expected {self.n}")
        for i, con in enumerate(self.constraints):
            for j, _ in con.support:
                if not 0 <= j < self.n:
                    raise ValueError(f"constraint {i + 1} references x{j + 1} but n={self.n}")
        if self.meta is not None and (self.meta.ends[-1] != self.n
                                      or list(self.meta.ends) != sorted(set(self.meta.ends))):
            raise ValueError("meta block ends must increase and finish at n")
        check_overflow(self)

    @property
    def m(self) -> int:
        return len(self.constraints)


def check_overflow(instance: IlpInstance) -> None:
    """Reject instances whose worst-case sums could leave the int64 range.

    Every h-value is a partial objective sum, so bounding sum |c_j| also
    bounds every table entry.
    """
    if sum(abs(c) for c in instance.objective) > INT64_MAX:
        raise OverflowError("sum of |objective coefficients| exceeds int64")
    for i, con in enumerate(instance.constraints):
        if sum(abs(a) for _, a in con.support) + abs(con.rhs) > INT64_MAX:
            raise OverflowError(f"constraint {i + 1} may overflow int64")


# -- assignments --------------------------------------------------------------
#
# An assignment is a tuple over {0, 1, None}; None marks an undefined position.


def is_complete(x) -> bool:
    return all(v is not None for v in x)


def evaluate(instance: IlpInstance, x) -> tuple[bool, int]:
    """Return ``(feasible, objective)`` for a full assignment."""
    if len(x) != instance.n:
        raise ValueError(f"assignment has length {len(x)}, expected {instance.n}")
    if not is_complete(x):
        raise ValueError("cannot evaluate a partial assignment")
    if any(v not in (0, 1) for v in x):
        raise ValueError("assignment values must be 0 or 1")
    feasible = all(con.lhs(x) <= con.rhs for con in instance.constraints)
    return feasible, sum(c * v for c, v in zip(instance.objective, x))


def violated_constraints(instance: IlpInstance, x) -> list[int]:
    """0-based indices of constraints that ``x`` violates."""
    return [i for i, con in enumerate(instance.constraints) if con.lhs(x) > con.rhs]


@dataclass
class SolveStats:
    nodes: int = 0
    entries: int = 0
    seconds: float = 0.0


@dataclass
class Solution:
    status: str
    x: tuple[int, ...] | None = None
    objective: int | None = None
    stats: SolveStats = field(default_factory=SolveStats)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


# -- text formats -------------------------------------------------------------


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _int(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected integer {what}, got {tok!r}", lineno) from None


def _parse_meta(tokens: list[str], lineno: int) -> StaircaseMeta:
    if tokens[0] != "meta":
        raise ParseError(f"unexpected token {tokens[0]!r} in header", lineno)
    fields = {}
    for tok in tokens[1:]:
        key, sep, val = tok.partition("=")
        if not sep or key not in ("k", "b", "blocks"):
            raise ParseError(f"bad meta field {tok!r}", lineno)
        fields[key] = val
    if set(fields) != {"k", "b", "blocks"}:
        raise ParseError("meta needs k=, b= and blocks=", lineno)
    ends = tuple(_int(v, lineno, "block end") for v in fields["blocks"].split(","))
    try:
        return StaircaseMeta(_int(fields["k"], lineno, "k"), _int(fields["b"], lineno, "b"), ends)
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from None


def parse_instance(text: str) -> IlpInstance:
    lines = [(no, _strip(raw)) for no, raw in enumerate(text.splitlines(), 1)]
    lines = [(no, s) for no, s in lines if s]
    if not lines:
        raise ParseError("empty instance file")

    no, header = lines[0]
    tok = header.split()
    if tok[0] != "ilp" or len(tok) < 3:
        raise ParseError("expected header 'ilp <n> <m>'", no)
    n, m = _int(tok[1], no, "n"), _int(tok[2], no, "m")
    if n < 1 or m < 0:
        raise ParseError("need n >= 1 and m >= 0", no)
    meta = _parse_meta(tok[3:], no) if len(tok) > 3 else None

    objective = None
    constraints = []
    for no, line in lines[1:]:
        tok = line.split()
        if tok[0] == "obj":
            if objective is not None:
                raise ParseError("duplicate obj line", no)
            if len(tok) - 1 != n:
                raise ParseError(f"obj has {len(tok) - 1} coefficients, expected {n}", no)
            objective = tuple(_int(t, no, "coefficient") for t in tok[1:])
        elif tok[0] == "con":
            if len(tok) < 3:
                raise ParseError("expected 'con <rhs> <nnz> j:a ...'", no)
            rhs, nnz = _int(tok[1], no, "rhs"), _int(tok[2], no, "nnz")
            terms = tok[3:]
            if nnz < 1 or len(terms) != nnz:
                raise ParseError(f"nnz={nnz} but {len(terms)} terms given", no)
            support = {}
            for term in terms:
                j_txt, sep, a_txt = term.partition(":")
                if not sep:
                    raise ParseError(f"bad term {term!r}", no)
                j = _int(j_txt, no, "index")
                if not 1 <= j <= n:
                    raise ParseError(f"index {j} out of range 1..{n}", no)
                if j - 1 in support:
                    raise ParseError(f"duplicate index {j} in constraint", no)
                support[j - 1] = _int(a_txt, no, "coefficient")
            constraints.append(Constraint(tuple(sorted(support.items())), rhs))
        else:
            raise ParseError(f"unknown line type {tok[0]!r}", no)

    if objective is None:
        raise ParseError("missing obj line")
    if len(constraints) != m:
        raise ParseError(f"header declares m={m} but {len(constraints)} constraints found")
    try:
        return IlpInstance(n, objective, tuple(constraints), meta)
    except OverflowError as exc:
        raise ParseError(f"overflow risk: {exc}") from None
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def serialize_instance(instance: IlpInstance) -> str:
    header = f"ilp {instance.n} {instance.m}"
    if instance.meta is not None:
        meta = instance.meta
        header += f" meta k={meta.k} b={meta.b} blocks={','.join(map(str, meta.ends))}"
    out = [header, "obj " + " ".join(map(str, instance.objective))]
    for con in instance.constraints:
        terms = " ".join(f"{j + 1}:{a}" for j, a in con.support)
        out.append(f"con {con.rhs} {len(con.support)} {terms}")
    return "\n".join(out) + "\n"


def read_instance(path) -> IlpInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def serialize_solution(sol: Solution) -> str:
    out = [f"status {sol.status}"]
    if sol.optimal:
        out.append(f"obj {sol.objective}")
        out.append("x " + "".join(map(str, sol.x)))
    return "\n".join(out) + "\n"


def parse_solution(text: str) -> Solution:
    fields = {}
    for no, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        key, _, val = line.partition(" ")
        if key not in ("status", "obj", "x") or key in fields:
            raise ParseError(f"unexpected or repeated field {key!r}", no)
        fields[key] = (no, val.strip())
    if "status" not in fields:
        raise ParseError("missing status line")
    no, status = fields["status"]
    if status not in (OPTIMAL, INFEASIBLE):
        raise ParseError(f"unknown status {status!r}", no)
    if status == INFEASIBLE:
        return Solution(INFEASIBLE)
    if "obj" not in fields or "x" not in fields:
        raise ParseError("optimal solution needs obj and x lines")
    no, obj = fields["obj"]
    value = _int(obj, no, "objective")
    no, bits = fields["x"]
    if not bits or set(bits) - {"0", "1"}:
        raise ParseError("x must be a string of 0/1", no)
    return Solution(OPTIMAL, tuple(int(ch) for ch in bits), value)
