"""Finite domains, possible worlds and the grounding statistics N and Q."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .logic import And, Atom, Constant, Equality, Formula, Not, Or, Predicate, grounding_substitutions, holds

DEFAULT_WORLD_LIMIT = 2 ** 24


class EnumerationLimitError(RuntimeError):
    """Brute-force enumeration refused because it exceeds the world limit."""

    def __init__(self, n_atoms: int, limit: int):
        self.n_atoms = n_atoms
        self.limit = limit
        super().__init__(
            f"refusing to enumerate 2^{n_atoms} worlds ({n_atoms} ground atoms); limit is {limit}"
        )


@dataclass(frozen=True)
class Domain:
    elements: tuple[str, ...]

    def __post_init__(self):
        if not self.elements:
            raise ValueError("domain must be nonempty")
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("domain element names must be distinct")

    @classmethod
    def of_size(cls, n: int, names: Sequence[str] | None = None) -> "Domain":
        if names is None:
            names = [str(i) for i in range(1, n + 1)]
        if len(names) != n:
            raise ValueError(f"domain size {n} but {len(names)} names given")
        return cls(tuple(names))

    @property
    def size(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)


def as_signature(signature: Iterable[Predicate]) -> tuple[Predicate, ...]:
    sig = tuple(signature)
    names = [p.name for p in sig]
    if len(set(names)) != len(names):
        raise ValueError("predicate names must be unique in a signature")
    return sig


class AtomIndex:
    """Canonical bijection between ground atoms and bit positions.

    Predicates in declaration order, argument tuples in lexicographic order
    of the domain's element order.
    """

    def __init__(self, signature: Sequence[Predicate], domain: Domain):
        self.signature = as_signature(signature)
        self.domain = domain
        self.atoms: list[tuple[str, tuple[str, ...]]] = []
        for pred in self.signature:
            for args in itertools.product(domain.elements, repeat=pred.arity):
                self.atoms.append((pred.name, args))
        self.position = {atom: i for i, atom in enumerate(self.atoms)}

    def __len__(self):
        return len(self.atoms)

    def index(self, pred_name: str, args: tuple[str, ...]) -> int:
        try:
            return self.position[(pred_name, args)]
        except KeyError:
            raise KeyError(f"unknown ground atom {format_atom(pred_name, args)}") from None


@lru_cache(maxsize=64)
def atom_index(signature: tuple[Predicate, ...], domain: Domain) -> AtomIndex:
    return AtomIndex(signature, domain)


def format_atom(pred_name: str, args: Sequence[str]) -> str:
    if not args:
        return pred_name
    return f"{pred_name}({','.join(args)})"


@dataclass(frozen=True)
class World:
    """A truth assignment stored as an integer bit vector over ``atom_index``."""

    signature: tuple[Predicate, ...]
    domain: Domain
    bits: int = 0

    @cached_property
    def index(self) -> AtomIndex:
        return atom_index(self.signature, self.domain)

    @classmethod
    def from_atoms(cls, signature, domain: Domain, true_atoms: Iterable[tuple[str, tuple[str, ...]]]) -> "World":
        signature = as_signature(signature)
        idx = atom_index(signature, domain)
        bits = 0
        for name, args in true_atoms:
            bits |= 1 << idx.index(name, tuple(args))
        return cls(signature, domain, bits)

    @classmethod
    def complete(cls, signature, domain: Domain) -> "World":
        signature = as_signature(signature)
        n = len(atom_index(signature, domain))
        return cls(signature, domain, (1 << n) - 1)

    def is_true(self, pred_name: str, args: tuple[str, ...]) -> bool:
        return bool((self.bits >> self.index.index(pred_name, args)) & 1)

    def true_atoms(self) -> list[tuple[str, tuple[str, ...]]]:
        return [atom for i, atom in enumerate(self.index.atoms) if (self.bits >> i) & 1]

    def serialize(self) -> str:
        """One true ground atom per line, in canonical atom order."""
        return "\n".join(format_atom(name, args) for name, args in self.true_atoms())


def count_ground_atoms(signature: Iterable[Predicate], domain: Domain) -> int:
    return sum(domain.size ** p.arity for p in signature)


def check_world_limit(n_atoms: int, limit: int = DEFAULT_WORLD_LIMIT) -> None:
    if 2 ** n_atoms > limit:
        raise EnumerationLimitError(n_atoms, limit)


def enumerate_worlds(signature, domain: Domain, limit: int = DEFAULT_WORLD_LIMIT) -> Iterator[World]:
    """Yield every world once; world k has atom j true iff bit j of k is set."""
    signature = as_signature(signature)
    n = count_ground_atoms(signature, domain)
    check_world_limit(n, limit)
    for bits in range(2 ** n):
        yield World(signature, domain, bits)


def grounding_count(alpha: Formula, domain: Domain) -> int:
    """|Delta|^|vars(alpha)|, the number of groundings (and the bound r_i)."""
    return domain.size ** len(alpha.variables)


def n_statistic(alpha: Formula, omega: World) -> int:
    return sum(holds(omega, alpha, theta) for theta in grounding_substitutions(alpha, omega.domain))


def q_statistic(alpha: Formula, omega: World) -> Fraction:
    return Fraction(n_statistic(alpha, omega), grounding_count(alpha, omega.domain))


def stat_vector(gamma: Sequence[Formula], omega: World) -> tuple[tuple[int, ...], tuple[Fraction, ...]]:
    ns = tuple(n_statistic(alpha, omega) for alpha in gamma)
    qs = tuple(Fraction(n, grounding_count(alpha, omega.domain)) for n, alpha in zip(ns, gamma))
    return ns, qs


# --- vectorized evaluation over all worlds -----------------------------------

def _atom_column(k: int, n_worlds: int) -> np.ndarray:
    # truth of atom k across worlds 0..n_worlds-1 in canonical order
    return ((np.arange(n_worlds, dtype=np.int64) >> k) & 1).astype(bool)


def _eval_batch(f: Formula, theta: dict, idx: AtomIndex, cols: dict, n_worlds: int):
    if isinstance(f, Atom):
        args = tuple(theta[t.name] if not isinstance(t, Constant) else t.name for t in f.args)
        k = idx.index(f.predicate.name, args)
        if k not in cols:
            cols[k] = _atom_column(k, n_worlds)
        return cols[k]
    if isinstance(f, Equality):
        left = f.left.name if isinstance(f.left, Constant) else theta[f.left.name]
        right = f.right.name if isinstance(f.right, Constant) else theta[f.right.name]
        return left == right
    if isinstance(f, Not):
        return np.logical_not(_eval_batch(f.operand, theta, idx, cols, n_worlds))
    if isinstance(f, And):
        return np.logical_and(
            _eval_batch(f.left, theta, idx, cols, n_worlds), _eval_batch(f.right, theta, idx, cols, n_worlds)
        )
    if isinstance(f, Or):
        return np.logical_or(
            _eval_batch(f.left, theta, idx, cols, n_worlds), _eval_batch(f.right, theta, idx, cols, n_worlds)
        )
    raise TypeError(f"not a formula: {f!r}")


def n_statistics_all_worlds(
    gamma: Sequence[Formula], signature, domain: Domain, limit: int = DEFAULT_WORLD_LIMIT
) -> np.ndarray:
    """Array of shape (2^atoms, len(gamma)); row k holds N(alpha_i, world k)."""
    signature = as_signature(signature)
    idx = atom_index(signature, domain)
    check_world_limit(len(idx), limit)
    n_worlds = 2 ** len(idx)
    out = np.zeros((n_worlds, len(gamma)), dtype=np.int64)
    cols: dict = {}
    for i, alpha in enumerate(gamma):
        for theta in grounding_substitutions(alpha, domain):
            val = _eval_batch(alpha, theta, idx, cols, n_worlds)
            out[:, i] += np.broadcast_to(np.asarray(val, dtype=np.int64), (n_worlds,))
    return out


@lru_cache(maxsize=32)
def _n_histogram(gamma: tuple[Formula, ...], signature: tuple[Predicate, ...], domain: Domain, limit: int):
    stats = n_statistics_all_worlds(gamma, signature, domain, limit)
    if len(gamma) == 0:
        return (((), 2 ** len(atom_index(signature, domain))),)
    rows, counts = np.unique(stats, axis=0, return_counts=True)
    return tuple((tuple(int(v) for v in row), int(c)) for row, c in zip(rows, counts))


def n_histogram(gamma: Sequence[Formula], signature, domain: Domain, limit: int = DEFAULT_WORLD_LIMIT):
    """Distinct N-vectors over all worlds with the number of worlds attaining each.

    Sorted lexicographically; counts sum to 2^atoms.
    """
    return _n_histogram(tuple(gamma), as_signature(signature), domain, limit)
