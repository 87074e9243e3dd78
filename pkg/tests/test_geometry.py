import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relpoly.geometry import (
    HalfSpace,
    LinearProgram,
    Polytope,
    affine_hull,
    canonical,
    check_certificate,
    contains,
    determinant,
    extreme_points,
    facets_from_vertices,
    generalized_cross_product,
    in_convex_hull,
    interiority_margin,
    lp_solve,
    minimize_constraints,
    nullspace,
    parse_rational,
    primitive_integer,
    rank,
    support,
)
from relpoly.geometry.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, Constraint

F = Fraction


def H(a, b):
    return HalfSpace.make(a, b)


def test_linalg_basics():
    assert determinant([[1, 2], [3, 4]]) == -2
    assert rank([[1, 2], [2, 4]]) == 1
    assert primitive_integer([F(2, 3), F(4, 3)])[0] == (1, 2)
    ns = nullspace([[1, 1, 0]], 3)
    assert len(ns) == 2
    assert all(v[0] + v[1] == 0 for v in ns)


def test_lp_examples():
    res = lp_solve(LinearProgram([1], [Constraint((1,), "<=", 1)]))
    assert res.status == OPTIMAL and res.value == 1
    res = lp_solve(LinearProgram([1], [Constraint((1,), "<=", 0), Constraint((-1,), "<=", -1)]))
    assert res.status == INFEASIBLE
    res = lp_solve(LinearProgram([1], [Constraint((-1,), "<=", 0)]))
    assert res.status == UNBOUNDED


def test_lp_mixed_senses_and_bounds():
    lp = LinearProgram(
        [F(3), F(2)],
        [Constraint((1, 1), "<=", 4), Constraint((1, 3), "<=", 6), Constraint((1, -1), "=", F(1, 2))],
        lower=[0, 0],
    )
    res = lp_solve(lp)
    assert res.status == OPTIMAL
    assert res.point == (F(15, 8), F(11, 8))
    assert res.value == F(67, 8)
    assert check_certificate(lp, res)


def test_lp_minimize_degenerate():
    # many constraints through one vertex; Bland's rule must terminate
    cons = [Constraint((1, k), "<=", k + 1) for k in range(8)] + [Constraint((-1, 0), "<=", 0), Constraint((0, -1), "<=", 0)]
    res = lp_solve(LinearProgram([-1, -1], cons, maximize=False))
    assert res.status == OPTIMAL and res.value == -2


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4), st.integers(0, 6)), min_size=1, max_size=6),
       st.tuples(st.integers(-3, 3), st.integers(-3, 3)))
def test_lp_against_vertex_scan(rows, obj):
    # box-bounded 2-D LP; the optimum is attained at an intersection of two tight rows
    cons = [Constraint((a, b), "<=", c) for a, b, c in rows]
    cons += [Constraint((1, 0), "<=", 5), Constraint((-1, 0), "<=", 5), Constraint((0, 1), "<=", 5), Constraint((0, -1), "<=", 5)]
    res = lp_solve(LinearProgram(obj, cons))
    best = None
    for i in range(len(cons)):
        for j in range(i + 1, len(cons)):
            (a1, b1), c1 = cons[i].a, cons[i].b
            (a2, b2), c2 = cons[j].a, cons[j].b
            det = a1 * b2 - a2 * b1
            if det == 0:
                continue
            x = ((c1 * b2 - c2 * b1) / F(det), (a1 * c2 - a2 * c1) / F(det))
            if all(c.satisfied_by(x) for c in cons):
                v = obj[0] * x[0] + obj[1] * x[1]
                best = v if best is None else max(best, v)
    assert res.status == OPTIMAL  # origin is always feasible
    assert res.value == best


def test_minimize_examples():
    assert minimize_constraints([H([1], 1), H([1], 2), H([-1], 0)]) == [H([1], 1), H([-1], 0)]
    minimal = [H([1], 1), H([-1], 0)]
    assert minimize_constraints(minimal) == minimal
    box = [H([1, 1], 2), H([1, 0], 1), H([0, 1], 1), H([-1, 0], 0), H([0, -1], 0)]
    assert H([1, 1], 2) not in minimize_constraints(box)


def test_minimize_duplicates_keeps_one():
    kept = minimize_constraints([H([1], 1), H([1], 1), H([-1], 0), H([2], 2)])
    assert kept.count(H([1], 1)) == 1
    assert len(kept) == 2


def test_minimize_degenerate_apex():
    # square pyramid: four facets meet at the apex, plus a redundant cut through it
    S = [H([0, 0, -1], 0), H([1, 0, 1], 1), H([-1, 0, 1], 1), H([0, 1, 1], 1), H([0, -1, 1], 1), H([1, 1, 2], 2)]
    kept = minimize_constraints(S)
    assert H([1, 1, 2], 2) not in kept
    full, red = Polytope(3, facets=tuple(S)), Polytope(3, facets=tuple(kept))
    rng = random.Random(3)
    for _ in range(50):
        d = [rng.randint(-3, 3) for _ in range(3)]
        assert support(full, d) == support(red, d)


def test_affine_hull_examples():
    eqs = affine_hull([(0, 0), (1, 1)])
    assert len(eqs) == 1
    assert eqs[0].a in ((1, -1), (-1, 1)) and eqs[0].b == 0
    assert affine_hull([(0, 0), (1, 0), (0, 1)]) == ()
    point = affine_hull([(F(1, 2), 3)])
    assert len(point) == 2
    assert all(h.slack((F(1, 2), 3)) == 0 for h in point)


def test_containment():
    unit = Polytope(1, vertices=((F(0),), (F(1),)))
    assert contains(unit, (F(1, 2),))
    assert not contains(unit, (F(3, 2),))
    tri = Polytope(2, vertices=((0, 0), (2, 0), (0, 2)))
    assert in_convex_hull((1, 1), tri.vertices)
    assert not in_convex_hull((F(3, 2), 1), tri.vertices)
    H_tri = canonical(tri)
    assert contains(Polytope(2, facets=H_tri.facets, equalities=H_tri.equalities), (1, 1))


def test_extreme_points_drop_interior():
    pts = [(0, 0), (2, 0), (0, 2), (2, 2), (1, 1), (1, 0)]
    assert sorted(extreme_points(pts)) == [(0, 0), (0, 2), (2, 0), (2, 2)]


def test_facets_from_vertices_square():
    facets, eqs = facets_from_vertices([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert eqs == ()
    assert sorted(facets, key=HalfSpace.sort_key) == sorted(
        [H([1, 0], 1), H([0, 1], 1), H([-1, 0], 0), H([0, -1], 0)], key=HalfSpace.sort_key
    )


def test_canonical_is_representation_independent():
    V = Polytope(2, vertices=((0, 0), (1, 1)))
    Hrep = Polytope(2, facets=(H([1, -1], 0), H([-1, 1], 0), H([1, 0], 1), H([-1, 0], 0), H([0, 1], 5)))
    a, b = canonical(V), canonical(Hrep)
    assert (a.facets, a.equalities) == (b.facets, b.equalities)


def test_cross_product():
    assert generalized_cross_product([(1, 2)]) in ((2, -1), (-2, 1))
    assert generalized_cross_product([(1, 0, 0), (0, 1, 0)]) == (0, 0, 1)
    assert generalized_cross_product([(1, 2, 3), (2, 4, 6)]) == (0, 0, 0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(st.integers(-5, 5), min_size=4, max_size=4), min_size=3, max_size=3))
def test_cross_product_is_perpendicular(vectors):
    v = generalized_cross_product(vectors)
    for u in vectors:
        assert sum(a * b for a, b in zip(u, v)) == 0
    if rank(vectors) < 3:
        assert not any(v)


def test_interiority_examples():
    unit = Polytope(1, vertices=((F(0),), (F(1),)))
    assert interiority_margin(unit, (F(1, 4),)).squared == F(1, 16)
    seg = Polytope(2, vertices=((0, 0), (1, 1)))
    m = interiority_margin(seg, (F(1, 2), F(1, 2)))
    assert m.squared == F(1, 2)
    assert m.value == pytest.approx(2 ** 0.5 / 2)
    assert interiority_margin(seg, (0, 0)).squared == 0
    assert interiority_margin(seg, (F(1, 2), F(1, 3))).squared == 0
    assert interiority_margin(unit, (F(2),)).squared == 0
    assert interiority_margin(Polytope(1, vertices=((F(1),),)), (F(1),)).squared == 0


def test_interiority_ball_is_contained():
    tri = Polytope(2, vertices=((0, 0), (4, 0), (0, 4)))
    theta = (F(1), F(1))
    r2 = interiority_margin(tri, theta).squared
    assert r2 == F(1)
    # points at distance slightly below r along the axes stay inside, slightly above leave
    assert contains(tri, (F(1), F(1, 100)))
    assert not contains(tri, (F(1), F(-1, 100)))


def test_polytope_json_round_trip():
    P = canonical(Polytope(2, vertices=((0, F(1, 3)), (1, 1), (F(1, 2), 0))))
    data = P.to_json()
    assert data["facets"][0]["b"].count("/") == 1
    Q = Polytope.from_json(data)
    assert (Q.facets, Q.equalities) == (P.facets, P.equalities)
    assert parse_rational([3, 6]) == F(1, 2)
    assert parse_rational("7/2") == F(7, 2)
