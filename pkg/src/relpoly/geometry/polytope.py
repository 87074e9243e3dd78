"""Polytopes with exact rational data, in vertex and half-space form."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .linalg import determinant, dot, nullspace, primitive_integer, rank, rref, solve_square, to_fraction
from .lp import Constraint, LinearProgram, OPTIMAL, UNBOUNDED, lp_solve, simplex_standard


@dataclass(frozen=True)
class HalfSpace:
    """``a . x <= b`` with ``a`` a primitive integer vector.

    The same type holds the rows ``a . x = b`` of an equality system; those are
    additionally sign-normalized so the first nonzero entry of ``a`` is positive.
    """

    a: tuple[int, ...]
    b: Fraction

    @classmethod
    def make(cls, a: Sequence, b) -> "HalfSpace":
        ints, scale = primitive_integer(a)
        return cls(ints, to_fraction(b) * scale)

    @classmethod
    def equality(cls, a: Sequence, c) -> "HalfSpace":
        h = cls.make(a, c)
        lead = next(x for x in h.a if x != 0)
        if lead < 0:
            h = cls(tuple(-x for x in h.a), -h.b)
        return h

    @property
    def dim(self) -> int:
        return len(self.a)

    def slack(self, x: Sequence) -> Fraction:
        return self.b - dot(self.a, x)

    def sort_key(self):
        return (self.a, self.b)

    def to_json(self, rhs_key: str = "b") -> dict:
        return {"a": list(self.a), rhs_key: format_rational(self.b)}


def format_rational(x) -> str:
    x = to_fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(x) -> Fraction:
    """Accepts ``"num/den"`` strings, ``[num, den]`` pairs and integers."""
    if isinstance(x, (list, tuple)):
        num, den = x
        return Fraction(int(num), int(den))
    return to_fraction(x)


@dataclass(frozen=True)
class Polytope:
    dim: int
    vertices: tuple[tuple[Fraction, ...], ...] | None = None
    facets: tuple[HalfSpace, ...] | None = None
    equalities: tuple[HalfSpace, ...] | None = None

    def __post_init__(self):
        if self.vertices is None and self.facets is None and self.equalities is None:
            raise ValueError("a polytope needs vertices or a half-space system")
        for v in self.vertices or ():
            if len(v) != self.dim:
                raise ValueError("vertex dimension mismatch")
        for h in (self.facets or ()) + (self.equalities or ()):
            if h.dim != self.dim:
                raise ValueError("half-space dimension mismatch")

    @classmethod
    def from_points(cls, points: Iterable[Sequence]) -> "Polytope":
        """V-representation from arbitrary points; non-extreme points are dropped."""
        pts = sorted({tuple(to_fraction(x) for x in p) for p in points})
        if not pts:
            raise ValueError("need at least one point")
        return cls(len(pts[0]), vertices=tuple(extreme_points(pts)))

    @property
    def has_h(self) -> bool:
        return self.facets is not None or self.equalities is not None

    def constraints(self) -> list[Constraint]:
        out = [Constraint(h.a, "<=", h.b) for h in self.facets or ()]
        out += [Constraint(h.a, "=", h.b) for h in self.equalities or ()]
        return out

    def to_json(self) -> dict:
        out: dict = {"dim": self.dim}
        if self.vertices is not None:
            out["vertices"] = [[format_rational(x) for x in v] for v in self.vertices]
        if self.facets is not None:
            out["facets"] = [h.to_json() for h in self.facets]
        if self.equalities is not None:
            out["equalities"] = [h.to_json("c") for h in self.equalities]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Polytope":
        vertices = facets = equalities = None
        if "vertices" in data:
            vertices = tuple(tuple(parse_rational(x) for x in v) for v in data["vertices"])
        if "facets" in data:
            facets = tuple(HalfSpace(tuple(int(x) for x in f["a"]), parse_rational(f["b"])) for f in data["facets"])
        if "equalities" in data:
            equalities = tuple(
                HalfSpace(tuple(int(x) for x in e["a"]), parse_rational(e.get("c", e.get("b"))))
                for e in data["equalities"]
            )
        return cls(int(data["dim"]), vertices, facets, equalities)


# --- points and vertices -----------------------------------------------------

def in_convex_hull(point: Sequence, points: Sequence[Sequence]) -> bool:
    """Feasibility of ``point = sum l_k p_k``, ``sum l_k = 1``, ``l >= 0``."""
    if not points:
        return False
    columns = [list(p) + [1] for p in points]
    rhs = [to_fraction(x) for x in point] + [Fraction(1)]
    res = simplex_standard(columns, rhs, [0] * len(points))
    return res.status == OPTIMAL


def extreme_points(points: Sequence[Sequence]) -> list[tuple[Fraction, ...]]:
    """Points that are not convex combinations of the others (input deduplicated)."""
    pts = list(dict.fromkeys(tuple(to_fraction(x) for x in p) for p in points))
    keep = []
    for i, p in enumerate(pts):
        others = pts[:i] + pts[i + 1:]
        if not in_convex_hull(p, others):
            keep.append(p)
    return keep


def _check_dim(P: Polytope, point: Sequence):
    if len(point) != P.dim:
        raise ValueError(f"point has dimension {len(point)}, polytope has {P.dim}")


def contains(P: Polytope, point: Sequence) -> bool:
    _check_dim(P, point)
    x = [to_fraction(v) for v in point]
    if P.vertices is not None:
        return in_convex_hull(x, P.vertices)
    return all(c.satisfied_by(x) for c in P.constraints())


def support(P: Polytope, direction: Sequence) -> Fraction | None:
    """max of ``direction . x`` over P; None when unbounded."""
    if P.vertices is not None:
        return max(dot(direction, v) for v in P.vertices)
    res = lp_solve(LinearProgram(list(direction), P.constraints()))
    if res.status == UNBOUNDED:
        return None
    if res.status != OPTIMAL:
        raise ValueError("empty polytope has no support function")
    return res.value


# --- affine hull and facets from vertices -----------------------------------

def affine_hull(vertices: Sequence[Sequence]) -> tuple[HalfSpace, ...]:
    """Canonical independent equalities ``A x = c`` satisfied by all vertices.

    Rows come from the reduced row echelon form of ``[A | c]``, each scaled to a
    primitive integer ``A``-part with positive leading entry, so the system is
    unique for a given affine hull.
    """
    if not vertices:
        raise ValueError("need at least one vertex")
    base = [to_fraction(x) for x in vertices[0]]
    m = len(base)
    diffs = [[to_fraction(x) - y for x, y in zip(v, base)] for v in vertices[1:]]
    diffs = [d for d in diffs if any(d)]
    normals = nullspace(diffs, m)
    return canonical_equalities([(a, dot(a, base)) for a in normals])


def canonical_equalities(rows: Sequence[tuple[Sequence, Fraction]]) -> tuple[HalfSpace, ...]:
    if not rows:
        return ()
    m = len(rows[0][0])
    reduced, pivots = rref([list(a) + [to_fraction(c)] for a, c in rows])
    if m in pivots:
        raise ValueError("inconsistent equality system")
    return tuple(HalfSpace.equality(row[:m], row[m]) for row in reduced)


def generalized_cross_product(vectors: Sequence[Sequence]) -> tuple:
    """Vector orthogonal to ``m - 1`` vectors of dimension ``m``.

    Component i is the determinant of the inputs stacked over the unit vector
    e_i (cofactor expansion). Zero iff the inputs are linearly dependent.
    """
    if not vectors:
        raise ValueError("dimension is undefined for an empty input; use generalized_cross_product_dim")
    m = len(vectors[0])
    return generalized_cross_product_dim(vectors, m)


def generalized_cross_product_dim(vectors: Sequence[Sequence], m: int) -> tuple:
    if len(vectors) != m - 1 or any(len(v) != m for v in vectors):
        raise ValueError(f"need exactly {m - 1} vectors of dimension {m}")
    rows = [list(v) for v in vectors]
    out = []
    for i in range(m):
        unit = [0] * m
        unit[i] = 1
        out.append(determinant(rows + [unit]))
    return tuple(out)


def facets_from_vertices(vertices: Sequence[Sequence]) -> tuple[tuple[HalfSpace, ...], tuple[HalfSpace, ...]]:
    """Relative facets and affine-hull equalities of conv(vertices).

    Facet normals lie in the direction space of the affine hull, so the
    result is a canonical H-representation.
    """
    verts = [tuple(to_fraction(x) for x in v) for v in vertices]
    m = len(verts[0])
    eqs = affine_hull(verts)
    d = m - len(eqs)
    if d == 0:
        return (), eqs
    eq_rows = [list(h.a) for h in eqs]
    found: dict[tuple[int, ...], HalfSpace] = {}
    for combo in itertools.combinations(range(len(verts)), d):
        base = verts[combo[0]]
        diffs = [[x - y for x, y in zip(verts[i], base)] for i in combo[1:]]
        normal = generalized_cross_product_dim(eq_rows + diffs, m)
        if not any(normal):
            continue
        ints, _ = primitive_integer(normal)
        for sgn in (1, -1):
            a = tuple(sgn * x for x in ints)
            if a in found:
                continue
            values = [dot(a, v) for v in verts]
            b = max(values)
            tight = [v for v, val in zip(verts, values) if val == b]
            tight_diffs = [[x - y for x, y in zip(v, tight[0])] for v in tight[1:]]
            face_dim = rank(tight_diffs) if tight_diffs else 0
            if face_dim == d - 1:
                found[a] = HalfSpace(a, Fraction(b))
    return tuple(sorted(found.values(), key=HalfSpace.sort_key)), eqs


# --- half-space systems --------------------------------------------------------

def minimize_constraints(
    S: Sequence[HalfSpace], equalities: Sequence[HalfSpace] = ()
) -> list[HalfSpace]:
    """Drop implied inequalities, keeping an irredundant subset with the same region.

    Each constraint is tested by maximizing its left-hand side over the
    constraints still kept (plus ``equalities``); it is dropped when that
    maximum does not exceed its offset. An unbounded maximum keeps it.
    Removing sequentially rather than all at once keeps the region intact
    when two constraints imply each other (duplicates, or lower-dimensional
    regions).
    """
    kept = list(S)
    eq_cons = [Constraint(h.a, "=", h.b) for h in equalities]
    j = 0
    while j < len(kept):
        target = kept[j]
        others = [Constraint(h.a, "<=", h.b) for i, h in enumerate(kept) if i != j] + eq_cons
        res = lp_solve(LinearProgram(list(target.a), others))
        if res.status == UNBOUNDED or (res.status == OPTIMAL and res.value > target.b):
            j += 1
        else:
            del kept[j]
    return kept


def implicit_equalities(facets: Sequence[HalfSpace], equalities: Sequence[HalfSpace] = ()) -> list[HalfSpace]:
    """Inequalities that hold with equality on the whole (nonempty) region."""
    cons = [Constraint(h.a, "<=", h.b) for h in facets] + [Constraint(h.a, "=", h.b) for h in equalities]
    out = []
    for h in facets:
        res = lp_solve(LinearProgram(list(h.a), cons, maximize=False))
        if res.status == OPTIMAL and res.value == h.b:
            out.append(h)
        elif res.status not in (OPTIMAL, UNBOUNDED):
            raise ValueError("empty region")
    return out


def canonical_h(facets: Sequence[HalfSpace], equalities: Sequence[HalfSpace] = ()) -> tuple[tuple[HalfSpace, ...], tuple[HalfSpace, ...]]:
    """Unique H-representation of a nonempty polytope.

    Equalities span the affine hull (RREF form); facet normals are projected
    onto its direction space, made primitive, and reduced to an irredundant,
    sorted set.
    """
    facets = list(facets)
    eq_rows = [(h.a, h.b) for h in equalities] + [(h.a, h.b) for h in implicit_equalities(facets, equalities)]
    eqs = canonical_equalities(eq_rows)
    A = [[Fraction(x) for x in h.a] for h in eqs]
    c = [h.b for h in eqs]
    gram = [[dot(r, s) for s in A] for r in A]
    projected: dict[tuple[int, ...], HalfSpace] = {}
    for h in facets:
        a = [Fraction(x) for x in h.a]
        if A:
            w = solve_square(gram, [dot(r, a) for r in A])
            a = [x - sum(wk * r[i] for wk, r in zip(w, A)) for i, x in enumerate(a)]
            b = h.b - dot(w, c)
        else:
            b = h.b
        if not any(a):
            continue
        hs = HalfSpace.make(a, b)
        if hs.a not in projected or hs.b < projected[hs.a].b:
            projected[hs.a] = hs
    ordered = sorted(projected.values(), key=HalfSpace.sort_key)
    reduced = minimize_constraints(ordered, eqs)
    return tuple(sorted(reduced, key=HalfSpace.sort_key)), eqs


def canonical(P: Polytope) -> Polytope:
    """P with a canonical H-representation attached (vertices kept if present)."""
    if P.vertices is not None:
        facets, eqs = facets_from_vertices(P.vertices)
    else:
        facets, eqs = canonical_h(P.facets or (), P.equalities or ())
    return Polytope(P.dim, P.vertices, facets, eqs)


# --- interiority -------------------------------------------------------------

@dataclass(frozen=True)
class Margin:
    squared: Fraction

    @property
    def value(self) -> float:
        return math.sqrt(self.squared)

    def to_json(self) -> dict:
        return {"squared": format_rational(self.squared), "value": self.value}


def interiority_margin(P: Polytope, theta: Sequence) -> Margin:
    """Radius of the largest ball around ``theta`` inside P within P's affine hull.

    Zero when ``theta`` is outside P or on its relative boundary, and zero for
    a single-point polytope.
    """
    _check_dim(P, theta)
    x = [to_fraction(v) for v in theta]
    Q = canonical(P)
    if any(dot(h.a, x) != h.b for h in Q.equalities):
        return Margin(Fraction(0))
    if not Q.facets:
        return Margin(Fraction(0))
    best = None
    for h in Q.facets:
        s = h.slack(x)
        if s < 0:
            return Margin(Fraction(0))
        d2 = s * s / dot(h.a, h.a)
        if best is None or d2 < best:
            best = d2
    return Margin(best)
