"""Markov logic networks with exact partition functions.

Weights are log-rationals ``ln(a/b)``, so in the N-parameterization every
world's unnormalized weight is the rational ``prod (a_i/b_i)^N_i`` and the
partition function is an exact ``Fraction``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Callable, Mapping, Sequence

from .geometry import format_rational
from .logic import (
    Atom,
    Formula,
    Predicate,
    Variable,
    grounding_substitutions,
    holds,
    iff,
    pretty_print,
)
from .worlds import (
    DEFAULT_WORLD_LIMIT,
    Domain,
    World,
    as_signature,
    count_ground_atoms,
    enumerate_worlds,
    grounding_count,
    n_histogram,
    n_statistic,
)

N_FORM = "N"
Q_FORM = "Q"


class FragmentError(ValueError):
    """The MLN lies outside the fragment an engine supports."""


def _integer_root(x: int, k: int) -> int | None:
    if k == 1:
        return x
    lo, hi = 0, 1
    while hi ** k <= x:
        hi *= 2
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid ** k <= x:
            lo = mid
        else:
            hi = mid - 1
    return lo if lo ** k == x else None


@dataclass(frozen=True)
class LogRationalWeight:
    """The weight ``ln a - ln b`` for positive integers a, b."""

    a: int
    b: int = 1

    def __post_init__(self):
        if int(self.a) != self.a or int(self.b) != self.b or self.a < 1 or self.b < 1:
            raise ValueError(f"log-rational weight needs positive integers, got {self.a}/{self.b}")

    @classmethod
    def parse(cls, text: str) -> "LogRationalWeight":
        num, _, den = text.strip().partition("/")
        try:
            return cls(int(num), int(den) if den else 1)
        except ValueError:
            raise ValueError(f"bad weight {text!r}; expected a/b with positive integers") from None

    @classmethod
    def from_ratio(cls, ratio: Fraction) -> "LogRationalWeight":
        ratio = Fraction(ratio)
        return cls(ratio.numerator, ratio.denominator)

    @property
    def ratio(self) -> Fraction:
        """exp(weight), exactly."""
        return Fraction(self.a, self.b)

    def power(self, k: int) -> "LogRationalWeight":
        return LogRationalWeight(self.a ** k, self.b ** k)

    def root(self, k: int) -> "LogRationalWeight | None":
        ra, rb = _integer_root(self.a, k), _integer_root(self.b, k)
        if ra is None or rb is None:
            return None
        return LogRationalWeight(ra, rb)

    def __float__(self):
        return math.log(self.a) - math.log(self.b)

    def __str__(self):
        return f"{self.a}/{self.b}"


@dataclass(frozen=True)
class MLN:
    signature: tuple[Predicate, ...]
    domain: Domain
    formulas: tuple[Formula, ...]
    weights: tuple[LogRationalWeight, ...]
    form: str = N_FORM

    def __post_init__(self):
        object.__setattr__(self, "signature", as_signature(self.signature))
        object.__setattr__(self, "formulas", tuple(self.formulas))
        object.__setattr__(self, "weights", tuple(self.weights))
        if len(self.formulas) != len(self.weights):
            raise ValueError("one weight per formula required")
        if self.form not in (N_FORM, Q_FORM):
            raise ValueError(f"unknown parameterization {self.form!r}")
        declared = set(self.signature)
        for f in self.formulas:
            for p in f.predicates():
                if p not in declared:
                    raise ValueError(f"formula {pretty_print(f)} uses undeclared predicate {p}")
            for c in f.constants:
                if c not in self.domain.elements:
                    raise ValueError(f"constant {c} is not a domain element")

    def to_n_form(self) -> "MLN":
        """Equivalent N-parameterized network.

        A Q-form weight w on a formula with v variables equals the N-form weight
        w / |Delta|^v, which stays log-rational only when a and b are exact
        powers; otherwise ValueError.
        """
        if self.form == N_FORM:
            return self
        new = []
        for f, w in zip(self.formulas, self.weights):
            k = grounding_count(f, self.domain)
            r = w.root(k)
            if r is None:
                raise ValueError(
                    f"Q-form weight {w} on {pretty_print(f)} has no exact N-form equivalent "
                    f"(needs integer {k}-th roots)"
                )
            new.append(r)
        return MLN(self.signature, self.domain, self.formulas, tuple(new), N_FORM)

    def to_q_form(self) -> "MLN":
        if self.form == Q_FORM:
            return self
        new = tuple(w.power(grounding_count(f, self.domain)) for f, w in zip(self.formulas, self.weights))
        return MLN(self.signature, self.domain, self.formulas, new, Q_FORM)

    def n_atoms(self) -> int:
        return count_ground_atoms(self.signature, self.domain)


def world_weight(mln: MLN, n_vector: Sequence[int]) -> Fraction:
    """Unnormalized weight prod (a_i/b_i)^N_i of a world with the given N-vector."""
    mln = mln.to_n_form()
    num = prod(w.a ** n for w, n in zip(mln.weights, n_vector))
    den = prod(w.b ** n for w, n in zip(mln.weights, n_vector))
    return Fraction(num, den)


def partition_z_brute(mln: MLN, limit: int = DEFAULT_WORLD_LIMIT) -> Fraction:
    """Z = sum over all worlds of prod (a_i/b_i)^N(alpha_i, world)."""
    mln = mln.to_n_form()
    hist = n_histogram(mln.formulas, mln.signature, mln.domain, limit)
    r = [grounding_count(f, mln.domain) for f in mln.formulas]
    # common denominator prod b_i^r_i keeps the sum in integers
    total = 0
    for n_vec, count in hist:
        term = count
        for w, n, ri in zip(mln.weights, n_vec, r):
            term *= w.a ** n * w.b ** (ri - n)
        total += term
    den = prod(w.b ** ri for w, ri in zip(mln.weights, r))
    return Fraction(total, den)


def _check_unary_fragment(mln: MLN) -> None:
    for f in mln.formulas:
        if len(f.variables) > 1:
            raise FragmentError(f"{pretty_print(f)} has {len(f.variables)} variables; lifted engine needs at most 1")
        if f.constants:
            raise FragmentError(f"{pretty_print(f)} contains constants")
        for p in f.predicates():
            if p.arity != 1:
                raise FragmentError(f"{pretty_print(f)} uses non-unary predicate {p}")


class _SingleElementWorld:
    """One domain element's unary atoms, viewed as a world."""

    def __init__(self, truth: Mapping[str, bool]):
        self.truth = truth

    def is_true(self, pred_name, args):
        return self.truth[pred_name]


def unary_configurations(mln: MLN):
    """Per-element configurations and which formulas they satisfy.

    Yields (truth map over unary predicates, tuple of satisfied flags).
    """
    _check_unary_fragment(mln)
    unary = [p for p in mln.signature if p.arity == 1]
    element = "e"
    for values in itertools.product((False, True), repeat=len(unary)):
        truth = dict(zip((p.name for p in unary), values))
        world = _SingleElementWorld(truth)
        flags = []
        for f in mln.formulas:
            theta = {v: element for v in f.variables}
            flags.append(holds(world, f, theta))
        yield truth, tuple(flags)


def partition_z_lifted_unary(mln: MLN) -> Fraction:
    """Z for MLNs whose formulas use one variable and unary predicates only.

    Elements are independent, so Z = z1^|Delta| times 2^(atoms of the other
    predicates), with z1 summed over the 2^(#unary predicates) configurations
    of a single element. Zero-variable formulas are not in the fragment
    (without constants they would have no atoms).
    """
    mln = mln.to_n_form()
    for f in mln.formulas:
        if len(f.variables) == 0:
            raise FragmentError(f"{pretty_print(f)} has no variables")
    z1 = Fraction(0)
    for _, flags in unary_configurations(mln):
        term = Fraction(1)
        for w, sat in zip(mln.weights, flags):
            if sat:
                term *= w.ratio
        z1 += term
    n = mln.domain.size
    other_atoms = sum(n ** p.arity for p in mln.signature if p.arity != 1)
    return z1 ** n * 2 ** other_atoms


ZEngine = Callable[[MLN], Fraction]

ENGINES: dict[str, ZEngine] = {
    "brute": partition_z_brute,
    "lifted1": partition_z_lifted_unary,
}


def get_engine(name: str) -> ZEngine:
    try:
        return ENGINES[name]
    except KeyError:
        raise ValueError(f"unknown engine {name!r}; choose from {sorted(ENGINES)}") from None


def expected_n(mln: MLN, limit: int = DEFAULT_WORLD_LIMIT) -> tuple[Fraction, ...]:
    mln = mln.to_n_form()
    hist = n_histogram(mln.formulas, mln.signature, mln.domain, limit)
    z = Fraction(0)
    acc = [Fraction(0)] * len(mln.formulas)
    for n_vec, count in hist:
        w = count * world_weight(mln, n_vec)
        z += w
        for i, n in enumerate(n_vec):
            acc[i] += w * n
    return tuple(a / z for a in acc)


def expected_q(mln: MLN, limit: int = DEFAULT_WORLD_LIMIT) -> tuple[Fraction, ...]:
    """Exact E[Q(alpha_i, .)] under the MLN's distribution."""
    en = expected_n(mln, limit)
    return tuple(e / grounding_count(f, mln.domain) for e, f in zip(en, mln.formulas))


def world_probability(mln: MLN, omega: World, z: Fraction | None = None) -> Fraction:
    if z is None:
        z = partition_z_brute(mln)
    return world_weight(mln, [n_statistic(f, omega) for f in mln.formulas]) / z


# --- weighted first-order model counting ------------------------------------

@dataclass(frozen=True)
class Sentence:
    """``forall variables: body`` with a quantifier-free body."""

    variables: tuple[str, ...]
    body: Formula

    def __str__(self):
        if not self.variables:
            return pretty_print(self.body)
        return f"forall {','.join(self.variables)}: {pretty_print(self.body)}"


@dataclass(frozen=True)
class WfomcProblem:
    signature: tuple[Predicate, ...]
    sentences: tuple[Sentence, ...]
    w: Mapping[str, Fraction] = field(default_factory=dict)
    w_bar: Mapping[str, Fraction] = field(default_factory=dict)

    def weight(self, pred_name: str) -> Fraction:
        return Fraction(self.w.get(pred_name, 1))

    def weight_bar(self, pred_name: str) -> Fraction:
        return Fraction(self.w_bar.get(pred_name, 1))

    def to_json(self) -> dict:
        return {
            "signature": [str(p) for p in self.signature],
            "sentences": [str(s) for s in self.sentences],
            "w": {p.name: format_rational(self.weight(p.name)) for p in self.signature},
            "w_bar": {p.name: format_rational(self.weight_bar(p.name)) for p in self.signature},
        }


def _fresh_name(base: str, taken: set[str]) -> str:
    name, k = base, 1
    while name in taken:
        name = f"{base}_{k}"
        k += 1
    taken.add(name)
    return name


def mln_to_wfomc(mln: MLN) -> WfomcProblem:
    """One fresh predicate xi_i per formula with forall x: xi_i(x) <=> alpha_i(x).

    N-form weights give w(xi_i) = a_i/b_i, w_bar(xi_i) = 1; all other
    predicates weigh 1 either way.
    """
    mln = mln.to_n_form()
    taken = {p.name for p in mln.signature}
    signature = list(mln.signature)
    sentences = []
    w: dict[str, Fraction] = {}
    for i, (f, weight) in enumerate(zip(mln.formulas, mln.weights), start=1):
        if f.constants:
            raise ValueError(f"formula {pretty_print(f)} contains constants; the translation needs constant-free formulas")
        xi = Predicate(_fresh_name(f"xi{i}", taken), len(f.variables))
        signature.append(xi)
        head = Atom(xi, tuple(Variable(v) for v in f.variables))
        sentences.append(Sentence(f.variables, iff(head, f)))
        w[xi.name] = weight.ratio
    return WfomcProblem(tuple(signature), tuple(sentences), w, {})


def wfomc_brute(problem: WfomcProblem, domain: Domain, limit: int = DEFAULT_WORLD_LIMIT) -> Fraction:
    """Weighted count of the models of the theory by exhaustive enumeration."""
    sig = problem.signature
    total = Fraction(0)
    weights = []
    for p in sig:
        weights.extend([(problem.weight(p.name), problem.weight_bar(p.name))] * domain.size ** p.arity)
    groundings = [(s, grounding_substitutions(s.body, domain) if s.variables else [{}]) for s in problem.sentences]
    for omega in enumerate_worlds(sig, domain, limit):
        if not all(holds(omega, s.body, th) for s, thetas in groundings for th in thetas):
            continue
        term = Fraction(1)
        bits = omega.bits
        for k, (wt, wb) in enumerate(weights):
            term *= wt if (bits >> k) & 1 else wb
        total += term
    return total
