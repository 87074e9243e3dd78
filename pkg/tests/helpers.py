"""Shared builders for the test modules."""
import random
from fractions import Fraction

from relpoly.logic import parse_formula, parse_predicate
from relpoly.worlds import Domain


def sig(*decls):
    return tuple(parse_predicate(d) for d in decls)


def formulas(signature, *texts):
    return tuple(parse_formula(t, signature) for t in texts)


def random_direction(rng: random.Random, m: int, lo: int = -5, hi: int = 5):
    while True:
        d = tuple(rng.randint(lo, hi) for _ in range(m))
        if any(d):
            return d


# (name, predicate declarations, formulas, domain size)
POLYTOPE_SUITE = [
    ("smokes", ("sm/1",), ("sm(x)",), 2),
    ("smokes-friends", ("sm/1", "fr/2"), ("sm(x)", "fr(x,y)"), 2),
    ("friend-of-smoker", ("sm/1", "fr/2"), ("fr(x,y) & sm(x)", "sm(y)"), 2),
    ("two-unary", ("sm/1", "ca/1"), ("sm(x) | ca(x)", "!sm(x) | ca(x)"), 3),
    ("symmetric-loops", ("fr/2",), ("fr(x,y) & fr(y,x)", "fr(x,x)"), 2),
    ("smoker-pairs", ("sm/1", "fr/2"), ("sm(x) & fr(x,y) & sm(y)",), 2),
    ("equality", ("sm/1", "fr/2"), ("sm(x)", "x = y | fr(x,y)"), 3),
    ("loops-edges", ("fr/2",), ("fr(x,x)", "fr(x,y)"), 3),
    ("constant", ("sm/1",), ("sm(1) | sm(x)",), 2),
    ("complement", ("sm/1",), ("sm(x)", "!sm(x)"), 3),
    ("tautology", ("sm/1", "fr/2"), ("sm(x) | !sm(x)", "fr(x,y)"), 2),
    ("edges-triangles", ("fr/2",), ("fr(x,y)", "fr(x,y) & fr(y,z) & fr(z,x)"), 3),
]


def suite_case(entry):
    name, decls, texts, n = entry
    s = sig(*decls)
    return name, s, formulas(s, *texts), Domain.of_size(n)


def edges_triangles(n: int = 3):
    s = sig("friends/2")
    gamma = formulas(s, "friends(x,y)", "friends(x,y) & friends(y,z) & friends(z,x)")
    return s, gamma, Domain.of_size(n)


def rational_grid(k: int):
    return [Fraction(i, k) for i in range(1, k)]
