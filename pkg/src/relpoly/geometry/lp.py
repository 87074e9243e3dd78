"""Exact rational linear programming.

The core is a two-phase revised simplex over ``min c.u s.t. A u = d, u >= 0``
with Bland's rule. It keeps an explicit inverse of the basis, so an
iteration costs O(rows^2 + rows * columns) and the solver is cheap whenever
the number of rows is small. General programs (few variables, many
inequalities) are solved through their dual, which has one row per primal
variable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .linalg import dot, to_fraction

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Constraint:
    """``a . x (sense) b`` with sense one of ``<=``, ``>=``, ``=``."""

    a: tuple[Fraction, ...]
    sense: str
    b: Fraction

    def __post_init__(self):
        if self.sense not in ("<=", ">=", "="):
            raise ValueError(f"bad constraint sense {self.sense!r}")
        object.__setattr__(self, "a", tuple(to_fraction(x) for x in self.a))
        object.__setattr__(self, "b", to_fraction(self.b))

    def satisfied_by(self, x: Sequence) -> bool:
        lhs = dot(self.a, x)
        if self.sense == "<=":
            return lhs <= self.b
        if self.sense == ">=":
            return lhs >= self.b
        return lhs == self.b


@dataclass
class LinearProgram:
    objective: Sequence
    constraints: list[Constraint] = field(default_factory=list)
    lower: Sequence | None = None  # per-variable lower bounds, None entries mean unbounded
    upper: Sequence | None = None
    maximize: bool = True

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    def all_constraints(self) -> list[Constraint]:
        n = self.n_vars
        out = list(self.constraints)
        for bounds, sense in ((self.lower, ">="), (self.upper, "<=")):
            if bounds is None:
                continue
            if len(bounds) != n:
                raise ValueError("bound vector length differs from number of variables")
            for j, v in enumerate(bounds):
                if v is not None:
                    unit = [0] * n
                    unit[j] = 1
                    out.append(Constraint(tuple(unit), sense, v))
        return out


@dataclass(frozen=True)
class LPResult:
    status: str
    value: Fraction | None = None
    point: tuple[Fraction, ...] | None = None

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL


@dataclass
class StandardFormResult:
    status: str
    value: Fraction | None
    solution: list[Fraction] | None
    multipliers: list[Fraction] | None


def _solve_phase(columns, cost, binv, basis, x_b, allowed):
    """Run Bland-rule simplex iterations in place. Returns OPTIMAL or UNBOUNDED."""
    k = len(binv)
    while True:
        c_b = [cost[j] for j in basis]
        pi = [sum(c_b[r] * binv[r][i] for r in range(k)) for i in range(k)]
        in_basis = set(basis)
        entering = None
        for j in range(len(columns)):
            if j in in_basis or not allowed(j):
                continue
            col = columns[j]
            reduced = cost[j] - sum(p * a for p, a in zip(pi, col) if a)
            if reduced < 0:
                entering = j
                break
        if entering is None:
            return OPTIMAL
        col = columns[entering]
        direction = [sum(binv[r][i] * col[i] for i in range(k) if col[i]) for r in range(k)]
        leave = None
        best = None
        for r in range(k):
            if direction[r] > 0:
                ratio = x_b[r] / direction[r]
                if best is None or ratio < best or (ratio == best and basis[r] < basis[leave]):
                    best, leave = ratio, r
        if leave is None:
            return UNBOUNDED
        _pivot(binv, x_b, direction, leave)
        basis[leave] = entering


def _pivot(binv, x_b, direction, r):
    k = len(binv)
    piv = direction[r]
    binv[r] = [v / piv for v in binv[r]]
    x_b[r] = x_b[r] / piv
    for i in range(k):
        if i != r and direction[i] != 0:
            f = direction[i]
            binv[i] = [a - f * b for a, b in zip(binv[i], binv[r])]
            x_b[i] = x_b[i] - f * x_b[r]


def simplex_standard(columns: Sequence[Sequence], rhs: Sequence, cost: Sequence) -> StandardFormResult:
    """Minimize ``cost . u`` subject to ``sum_j u_j columns[j] = rhs``, ``u >= 0``.

    ``multipliers`` are the simplex multipliers of the optimal basis, i.e. an
    optimal solution of the dual ``max rhs . y s.t. columns[j] . y <= cost[j]``.
    """
    k = len(rhs)
    n = len(columns)
    rhs = [to_fraction(v) for v in rhs]
    sign = [(-1 if v < 0 else 1) for v in rhs]
    cols = [[to_fraction(c[i]) * sign[i] for i in range(k)] for c in columns]
    if any(len(c) != k for c in columns):
        raise ValueError("column length differs from number of rows")
    d = [abs(v) for v in rhs]
    # artificial columns n..n+k-1
    for i in range(k):
        unit = [Fraction(0)] * k
        unit[i] = Fraction(1)
        cols.append(unit)
    binv = [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    basis = list(range(n, n + k))
    x_b = list(d)

    phase1_cost = [Fraction(0)] * n + [Fraction(1)] * k
    _solve_phase(cols, phase1_cost, binv, basis, x_b, lambda j: True)
    if sum(x_b[r] for r in range(k) if basis[r] >= n) > 0:
        return StandardFormResult(INFEASIBLE, None, None, None)

    # drive zero-level artificials out of the basis where possible
    for r in range(k):
        if basis[r] < n:
            continue
        in_basis = set(basis)
        for j in range(n):
            if j in in_basis:
                continue
            entry = sum(binv[r][i] * cols[j][i] for i in range(k) if cols[j][i])
            if entry != 0:
                direction = [sum(binv[q][i] * cols[j][i] for i in range(k) if cols[j][i]) for q in range(k)]
                _pivot(binv, x_b, direction, r)
                basis[r] = j
                break
        # otherwise the row is redundant and the artificial stays at zero

    phase2_cost = [to_fraction(c) for c in cost] + [Fraction(0)] * k
    status = _solve_phase(cols, phase2_cost, binv, basis, x_b, lambda j: j < n)
    if status == UNBOUNDED:
        return StandardFormResult(UNBOUNDED, None, None, None)
    u = [Fraction(0)] * n
    for r, j in enumerate(basis):
        if j < n:
            u[j] = x_b[r]
    c_b = [phase2_cost[j] for j in basis]
    pi = [sum(c_b[r] * binv[r][i] for r in range(k)) * sign[i] for i in range(k)]
    value = sum((phase2_cost[j] * u[j] for j in range(n)), Fraction(0))
    return StandardFormResult(OPTIMAL, value, u, pi)


def _is_feasible(rows: list[tuple[Sequence[Fraction], Fraction, bool]], n_vars: int) -> bool:
    """Farkas test for ``a.x <= b`` (and ``a.x = b`` when the flag is set)."""
    # infeasible iff some y >= 0 (free on equalities) has sum y_i a_i = 0 and sum y_i b_i < 0
    columns, cost = [], []
    for a, b, is_eq in rows:
        columns.append(list(a) + [Fraction(1)])
        cost.append(b)
        if is_eq:
            columns.append([-x for x in a] + [Fraction(1)])
            cost.append(-b)
    slack = [Fraction(0)] * n_vars + [Fraction(1)]
    columns.append(slack)
    cost.append(Fraction(0))
    rhs = [Fraction(0)] * n_vars + [Fraction(1)]
    res = simplex_standard(columns, rhs, cost)
    return res.status == OPTIMAL and res.value >= 0


def lp_solve(lp: LinearProgram) -> LPResult:
    """Solve a linear program exactly over the rationals."""
    n = lp.n_vars
    c = [to_fraction(v) for v in lp.objective]
    if not lp.maximize:
        c = [-v for v in c]
    rows: list[tuple[tuple[Fraction, ...], Fraction, bool]] = []
    for con in lp.all_constraints():
        if len(con.a) != n:
            raise ValueError(f"constraint has {len(con.a)} coefficients, program has {n} variables")
        if con.sense == ">=":
            rows.append((tuple(-x for x in con.a), -con.b, False))
        else:
            rows.append((con.a, con.b, con.sense == "="))

    # dual: min sum b_i y_i s.t. sum y_i a_i = c, y_i >= 0 (free for equalities)
    columns, cost = [], []
    for a, b, is_eq in rows:
        columns.append(a)
        cost.append(b)
        if is_eq:
            columns.append(tuple(-x for x in a))
            cost.append(-b)
    dual = simplex_standard(columns, c, cost)
    if dual.status == OPTIMAL:
        x = tuple(dual.multipliers)
        value = dot(c, x)
        if not lp.maximize:
            value = -value
        return LPResult(OPTIMAL, Fraction(value), x)
    if dual.status == UNBOUNDED:
        return LPResult(INFEASIBLE)
    if _is_feasible(rows, n):
        return LPResult(UNBOUNDED)
    return LPResult(INFEASIBLE)


def check_certificate(lp: LinearProgram, result: LPResult) -> bool:
    """True when an optimal point satisfies every constraint and attains the value."""
    if not result.is_optimal:
        return False
    if any(not con.satisfied_by(result.point) for con in lp.all_constraints()):
        return False
    return dot([to_fraction(v) for v in lp.objective], result.point) == result.value
