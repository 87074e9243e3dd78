"""Facets of relational marginal polytopes from partition-function queries.

For every candidate facet normal ``a`` (perpendicular to a hyperplane through
integer statistic points), the offset ``b = max_w a . N(w)`` is read off the
partition function of the MLN with weights ``2 a_i ln B``, ``B >= |Omega|``:
each world contributes ``B^(2 a.N(w))``, so ``Z <= B^(2b+1)`` exactly when no
world exceeds ``b``. Redundant half-spaces are then removed by LP.
"""
from __future__ import annotations

import itertools
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .geometry import (
    HalfSpace,
    Polytope,
    canonical,
    extreme_points,
    generalized_cross_product,
    generalized_cross_product_dim,
    minimize_constraints,
    primitive_integer,
)
from .logic import Formula, Predicate
from .mln import MLN, LogRationalWeight, ZEngine, get_engine
from .worlds import DEFAULT_WORLD_LIMIT, Domain, as_signature, count_ground_atoms, grounding_count, n_histogram

log = logging.getLogger(__name__)

DEFAULT_TUPLE_BUDGET = 2_000_000

__all__ = [
    "BudgetExceededError",
    "CandidateNormal",
    "IrmpResult",
    "construct_irmp",
    "enumerate_candidate_normals",
    "find_b",
    "generalized_cross_product",
    "irmp_from_rmp",
    "max_weighted_count",
    "polytope_bruteforce",
    "rmp_from_irmp",
    "vertices_bruteforce",
]


class BudgetExceededError(RuntimeError):
    pass


@dataclass(frozen=True)
class CandidateNormal:
    a: tuple[int, ...]
    provenance: tuple[tuple[int, ...], ...]


def statistic_bounds(gamma: Sequence[Formula], domain: Domain) -> list[int]:
    """r_i = |Delta|^|vars(alpha_i)|, an upper bound on N(alpha_i, .)."""
    return [grounding_count(f, domain) for f in gamma]


def enumerate_candidate_normals(
    gamma: Sequence[Formula], domain: Domain, budget: int = DEFAULT_TUPLE_BUDGET
) -> list[CandidateNormal]:
    """Primitive normals (both signs) of hyperplanes through m affinely
    independent points of the grid prod_i {0..r_i}, sorted by normal."""
    m = len(gamma)
    if m < 1:
        raise ValueError("need at least one formula")
    r = statistic_bounds(gamma, domain)
    n_points = math.prod(ri + 1 for ri in r)
    n_tuples = math.comb(n_points, m)
    if n_tuples > budget:
        raise BudgetExceededError(
            f"{n_tuples} point tuples exceed the budget of {budget}; use the brute-force method instead"
        )
    points = list(itertools.product(*(range(ri + 1) for ri in r)))
    found: dict[tuple[int, ...], CandidateNormal] = {}
    for combo in itertools.combinations(points, m):
        base = combo[0]
        diffs = [tuple(x - y for x, y in zip(p, base)) for p in combo[1:]]
        v = generalized_cross_product_dim(diffs, m)
        if not any(v):
            continue
        prim, _ = primitive_integer(v)
        for sign in (1, -1):
            a = tuple(sign * x for x in prim)
            if a not in found:
                found[a] = CandidateNormal(a, combo)
    return [found[a] for a in sorted(found)]


def _base(signature: Sequence[Predicate], domain: Domain) -> int:
    # any base >= |Omega| works; 2 guards the atom-free case |Omega| = 1
    return max(2 ** count_ground_atoms(signature, domain), 2)


def _threshold_holds(z: Fraction, base: int, b: int) -> bool:
    """z <= base^(2b+1), exactly."""
    e = 2 * b + 1
    if e >= 0:
        return z.numerator <= z.denominator * base ** e
    return z.numerator * base ** (-e) <= z.denominator


def offset_mln(a: Sequence[int], gamma: Sequence[Formula], signature, domain: Domain) -> MLN:
    """The MLN {(alpha_i, 2 a_i ln B)} with B = max(|Omega|, 2)."""
    base = _base(signature, domain)
    weights = []
    for ai in a:
        if ai >= 0:
            weights.append(LogRationalWeight(base ** (2 * ai), 1))
        else:
            weights.append(LogRationalWeight(1, base ** (-2 * ai)))
    return MLN(signature, domain, tuple(gamma), tuple(weights))


def find_b(
    a: Sequence[int],
    gamma: Sequence[Formula],
    signature,
    domain: Domain,
    engine: ZEngine | str = "brute",
) -> int:
    """Smallest integer b with Z <= B^(2b+1); equals max over worlds of a . N."""
    if not any(a):
        raise ValueError("normal must be nonzero")
    if isinstance(engine, str):
        engine = get_engine(engine)
    signature = as_signature(signature)
    base = _base(signature, domain)
    z = engine(offset_mln(a, gamma, signature, domain))
    # start near log_B(Z)/2 and walk to the exact threshold
    log_z = (z.numerator.bit_length() - z.denominator.bit_length()) / math.log2(base)
    b = math.floor((log_z - 1) / 2)
    if _threshold_holds(z, base, b):
        while _threshold_holds(z, base, b - 1):
            b -= 1
    else:
        b += 1
        while not _threshold_holds(z, base, b):
            b += 1
    return b


def max_weighted_count(a: Sequence[int], gamma: Sequence[Formula], signature, domain: Domain,
                       limit: int = DEFAULT_WORLD_LIMIT) -> int:
    """max over all worlds of sum_i a_i N(alpha_i, world), by enumeration."""
    hist = n_histogram(gamma, signature, domain, limit)
    return max(sum(ai * ni for ai, ni in zip(a, n_vec)) for n_vec, _ in hist)


@dataclass
class IrmpResult:
    polytope: Polytope
    query_log: list[dict] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    n_candidates: int = 0

    def query_log_json(self) -> dict:
        return {"queries": self.query_log, "n_candidates": self.n_candidates, "timings": self.timings}


def construct_irmp(
    gamma: Sequence[Formula],
    signature,
    domain: Domain,
    engine: str = "brute",
    budget: int = DEFAULT_TUPLE_BUDGET,
    workers: int = 1,
) -> IrmpResult:
    """H-representation of conv{N(w)} from candidate normals and Z queries."""
    signature = as_signature(signature)
    engine_fn = get_engine(engine) if isinstance(engine, str) else engine
    engine_name = engine if isinstance(engine, str) else getattr(engine, "__name__", "custom")
    timings = {}
    t0 = time.perf_counter()
    candidates = enumerate_candidate_normals(gamma, domain, budget)
    timings["enumerate_normals"] = time.perf_counter() - t0
    log.info("%d candidate normals", len(candidates))

    t0 = time.perf_counter()

    def query(c: CandidateNormal) -> int:
        return find_b(c.a, gamma, signature, domain, engine_fn)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            offsets = list(pool.map(query, candidates))
    else:
        offsets = [query(c) for c in candidates]
    timings["find_b"] = time.perf_counter() - t0
    half_spaces = [HalfSpace(c.a, Fraction(b)) for c, b in zip(candidates, offsets)]
    query_log = [
        {"normal": list(c.a), "b": b, "engine": engine_name, "points": [list(p) for p in c.provenance]}
        for c, b in zip(candidates, offsets)
    ]

    t0 = time.perf_counter()
    facets = minimize_constraints(half_spaces)
    timings["minimize"] = time.perf_counter() - t0
    log.info("%d of %d half-spaces kept", len(facets), len(half_spaces))
    polytope = Polytope(len(gamma), facets=tuple(facets), equalities=())
    return IrmpResult(polytope, query_log, timings, len(candidates))


def _scales(gamma: Sequence[Formula], domain: Domain) -> list[int]:
    return statistic_bounds(gamma, domain)


def _rescale(P: Polytope, factors: Sequence[Fraction]) -> Polytope:
    """Image of P under x_i -> x_i / factors_i."""
    vertices = facets = equalities = None
    if P.vertices is not None:
        vertices = tuple(tuple(Fraction(x) / f for x, f in zip(v, factors)) for v in P.vertices)
    if P.facets is not None:
        facets = tuple(HalfSpace.make([ai * f for ai, f in zip(h.a, factors)], h.b) for h in P.facets)
    if P.equalities is not None:
        equalities = tuple(HalfSpace.equality([ai * f for ai, f in zip(h.a, factors)], h.b) for h in P.equalities)
    return Polytope(P.dim, vertices, facets, equalities)


def rmp_from_irmp(P: Polytope, gamma: Sequence[Formula], domain: Domain) -> Polytope:
    """Map N-coordinates to Q-coordinates, Q_i = N_i / |Delta|^|vars(alpha_i)|."""
    return _rescale(P, [Fraction(s) for s in _scales(gamma, domain)])


def irmp_from_rmp(P: Polytope, gamma: Sequence[Formula], domain: Domain) -> Polytope:
    return _rescale(P, [Fraction(1, s) for s in _scales(gamma, domain)])


def vertices_bruteforce(gamma: Sequence[Formula], signature, domain: Domain, coords: str = "q",
                        limit: int = DEFAULT_WORLD_LIMIT) -> Polytope:
    """Extreme points among the statistic vectors of all worlds."""
    hist = n_histogram(gamma, signature, domain, limit)
    if coords == "n":
        points = [tuple(Fraction(n) for n in n_vec) for n_vec, _ in hist]
    elif coords == "q":
        r = statistic_bounds(gamma, domain)
        points = [tuple(Fraction(n, ri) for n, ri in zip(n_vec, r)) for n_vec, _ in hist]
    else:
        raise ValueError(f"coords must be 'n' or 'q', got {coords!r}")
    return Polytope(len(gamma), vertices=tuple(extreme_points(sorted(points))))


def polytope_bruteforce(gamma: Sequence[Formula], signature, domain: Domain, coords: str = "q",
                        limit: int = DEFAULT_WORLD_LIMIT) -> Polytope:
    """Brute-force vertices plus their canonical facet system."""
    return canonical(vertices_bruteforce(gamma, signature, domain, coords, limit))


def polytope_from_queries(gamma: Sequence[Formula], signature, domain: Domain, coords: str = "q",
                      engine: str = "brute", budget: int = DEFAULT_TUPLE_BUDGET,
                      workers: int = 1) -> tuple[Polytope, IrmpResult]:
    """Canonical facet system obtained only through partition-function queries."""
    result = construct_irmp(gamma, signature, domain, engine, budget, workers)
    P = canonical(result.polytope)
    if coords == "q":
        P = canonical(rmp_from_irmp(P, gamma, domain))
    elif coords != "n":
        raise ValueError(f"coords must be 'n' or 'q', got {coords!r}")
    return P, result
