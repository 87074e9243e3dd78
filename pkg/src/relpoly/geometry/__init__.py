"""Exact linear programming and polytope operations."""
from .linalg import determinant, nullspace, primitive_integer, rank, rref
from .lp import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    Constraint,
    LinearProgram,
    LPResult,
    check_certificate,
    lp_solve,
    simplex_standard,
)
from .polytope import (
    HalfSpace,
    Margin,
    Polytope,
    affine_hull,
    canonical,
    canonical_equalities,
    canonical_h,
    contains,
    extreme_points,
    facets_from_vertices,
    format_rational,
    generalized_cross_product,
    generalized_cross_product_dim,
    implicit_equalities,
    in_convex_hull,
    interiority_margin,
    minimize_constraints,
    parse_rational,
    support,
)
