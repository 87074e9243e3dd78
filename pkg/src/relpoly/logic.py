"""Function-free, quantifier-free first-order formulas.

Concrete syntax: ``&`` (and), ``|`` (or), prefix ``!`` (not), ``=`` between
terms, parentheses. Identifiers starting with a lowercase letter are
variables, identifiers starting with an uppercase letter or a digit are
constants.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union


class FormulaSyntaxError(ValueError):
    """Raised for malformed formula text; ``pos`` is a character offset."""

    def __init__(self, message: str, pos: int | None = None, token: str | None = None):
        self.pos = pos
        self.token = token
        where = "" if pos is None else f" at column {pos + 1}"
        tok = "" if token is None else f" (token {token!r})"
        super().__init__(f"{message}{where}{tok}")


@dataclass(frozen=True)
class Predicate:
    name: str
    arity: int

    def __post_init__(self):
        if not self.name:
            raise ValueError("predicate name must be nonempty")
        if self.arity < 0:
            raise ValueError(f"negative arity for {self.name}")

    def __str__(self):
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Constant:
    name: str

    def __str__(self):
        return self.name


Term = Union[Variable, Constant]


class Formula:
    """Base class of the formula AST. Subclasses are frozen dataclasses."""

    @cached_property
    def variables(self) -> tuple[str, ...]:
        """Free variables in order of first occurrence."""
        seen: dict[str, None] = {}
        for term in self.terms():
            if isinstance(term, Variable):
                seen.setdefault(term.name, None)
        return tuple(seen)

    @cached_property
    def constants(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for term in self.terms():
            if isinstance(term, Constant):
                seen.setdefault(term.name, None)
        return tuple(seen)

    def terms(self) -> Iterable[Term]:
        raise NotImplementedError

    def atoms(self) -> Iterable["Atom"]:
        raise NotImplementedError

    def predicates(self) -> tuple[Predicate, ...]:
        return tuple(dict.fromkeys(atom.predicate for atom in self.atoms()))

    def __str__(self):
        return pretty_print(self)


@dataclass(frozen=True)
class Atom(Formula):
    predicate: Predicate
    args: tuple[Term, ...] = ()

    def __post_init__(self):
        if len(self.args) != self.predicate.arity:
            raise ValueError(
                f"{self.predicate.name} expects {self.predicate.arity} arguments, got {len(self.args)}"
            )

    def terms(self):
        return iter(self.args)

    def atoms(self):
        yield self


@dataclass(frozen=True)
class Equality(Formula):
    left: Term
    right: Term

    def terms(self):
        return iter((self.left, self.right))

    def atoms(self):
        return iter(())


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula

    def terms(self):
        return self.operand.terms()

    def atoms(self):
        return self.operand.atoms()


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def terms(self):
        return itertools.chain(self.left.terms(), self.right.terms())

    def atoms(self):
        return itertools.chain(self.left.atoms(), self.right.atoms())


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def terms(self):
        return itertools.chain(self.left.terms(), self.right.terms())

    def atoms(self):
        return itertools.chain(self.left.atoms(), self.right.atoms())


def iff(left: Formula, right: Formula) -> Formula:
    """``left <=> right`` expressed with the core connectives."""
    return Or(And(left, right), And(Not(left), Not(right)))


def conjunction(parts: Sequence[Formula]) -> Formula:
    out = parts[0]
    for part in parts[1:]:
        out = And(out, part)
    return out


# --- parsing -----------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(?P<ident>[A-Za-z0-9_][A-Za-z0-9_']*)|(?P<op>[()&|!=,:~∀∃]))")
_QUANTIFIERS = {"forall", "exists", "∀", "∃"}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise FormulaSyntaxError("unexpected character", start, text[start])
        tok = m.group("ident") or m.group("op")
        tokens.append((tok, m.start(m.lastgroup)))
        pos = m.end()
    return tokens


def make_term(name: str) -> Term:
    if name[0].islower():
        return Variable(name)
    return Constant(name)


class _Parser:
    def __init__(self, text: str, signature: Mapping[str, Predicate]):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.signature = signature
        for tok, pos in self.tokens:
            if tok in _QUANTIFIERS:
                raise FormulaSyntaxError("quantifiers are not allowed", pos, tok)

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def pos(self):
        return self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)

    def expect(self, tok):
        if self.peek() != tok:
            raise FormulaSyntaxError(f"expected {tok!r}", self.pos(), self.peek())
        self.i += 1

    def parse(self) -> Formula:
        if not self.tokens:
            raise FormulaSyntaxError("empty formula", 0)
        f = self.disjunction()
        if self.peek() is not None:
            raise FormulaSyntaxError("trailing input", self.pos(), self.peek())
        return f

    def disjunction(self):
        f = self.conjunction()
        while self.peek() == "|":
            self.i += 1
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.unary()
        while self.peek() == "&":
            self.i += 1
            f = And(f, self.unary())
        return f

    def unary(self):
        tok = self.peek()
        if tok in ("!", "~"):
            self.i += 1
            return Not(self.unary())
        if tok == "(":
            self.i += 1
            f = self.disjunction()
            self.expect(")")
            return f
        if tok is None or not (tok[0].isalnum() or tok[0] == "_"):
            raise FormulaSyntaxError("expected an atom", self.pos(), tok)
        return self.atomic()

    def atomic(self):
        name, pos = self.tokens[self.i]
        self.i += 1
        nxt = self.peek()
        if nxt == "(":
            pred = self.signature.get(name)
            if pred is None:
                raise FormulaSyntaxError("unknown predicate", pos, name)
            self.i += 1
            args: list[Term] = []
            if self.peek() != ")":
                args.append(self.term())
                while self.peek() == ",":
                    self.i += 1
                    args.append(self.term())
            self.expect(")")
            if len(args) != pred.arity:
                raise FormulaSyntaxError(
                    f"arity mismatch: {pred.name}/{pred.arity} applied to {len(args)} arguments", pos, name
                )
            return Atom(pred, tuple(args))
        if nxt == "=":
            self.i += 1
            return Equality(make_term(name), self.term())
        pred = self.signature.get(name)
        if pred is not None and pred.arity == 0:
            return Atom(pred, ())
        if pred is not None:
            raise FormulaSyntaxError(f"arity mismatch: {pred.name}/{pred.arity} used without arguments", pos, name)
        raise FormulaSyntaxError("unknown predicate", pos, name)

    def term(self) -> Term:
        tok = self.peek()
        if tok is None or not (tok[0].isalnum() or tok[0] == "_"):
            raise FormulaSyntaxError("expected a term", self.pos(), tok)
        self.i += 1
        return make_term(tok)


def signature_map(signature: Iterable[Predicate]) -> dict[str, Predicate]:
    out: dict[str, Predicate] = {}
    for pred in signature:
        if pred.name in out and out[pred.name] != pred:
            raise ValueError(f"predicate {pred.name} declared twice with different arities")
        out[pred.name] = pred
    return out


def parse_formula(text: str, signature: Iterable[Predicate]) -> Formula:
    """Parse ``text`` against the declared predicates in ``signature``."""
    sig = signature if isinstance(signature, Mapping) else signature_map(signature)
    return _Parser(text, sig).parse()


def parse_predicate(text: str) -> Predicate:
    """Parse a ``name/arity`` declaration."""
    m = re.fullmatch(r"\s*([a-z][A-Za-z0-9_']*)\s*/\s*(\d+)\s*", text)
    if m is None:
        raise FormulaSyntaxError(f"bad predicate declaration {text!r}")
    return Predicate(m.group(1), int(m.group(2)))


def pretty_print(f: Formula) -> str:
    if isinstance(f, Atom):
        if f.predicate.arity == 0:
            return f.predicate.name
        return f"{f.predicate.name}({','.join(str(t) for t in f.args)})"
    if isinstance(f, Equality):
        return f"{f.left} = {f.right}"
    if isinstance(f, Not):
        inner = pretty_print(f.operand)
        if isinstance(f.operand, (And, Or, Equality)):
            inner = f"({inner})"
        return f"!{inner}"
    if isinstance(f, And):
        left = pretty_print(f.left)
        right = pretty_print(f.right)
        if isinstance(f.left, Or):
            left = f"({left})"
        if isinstance(f.right, (And, Or)):
            right = f"({right})"
        return f"{left} & {right}"
    if isinstance(f, Or):
        left = pretty_print(f.left)
        right = pretty_print(f.right)
        if isinstance(f.right, Or):
            right = f"({right})"
        return f"{left} | {right}"
    raise TypeError(f"not a formula: {f!r}")


# --- grounding and evaluation ------------------------------------------------

Substitution = dict


def grounding_substitutions(alpha: Formula, domain) -> list[dict[str, str]]:
    """All maps from ``alpha``'s variables to domain elements, lexicographic."""
    elements = getattr(domain, "elements", domain)
    if len(elements) == 0:
        raise ValueError("domain must be nonempty")
    names = alpha.variables
    return [dict(zip(names, combo)) for combo in itertools.product(elements, repeat=len(names))]


def _ground_term(term: Term, theta: Mapping[str, str]) -> str:
    if isinstance(term, Constant):
        return term.name
    try:
        return theta[term.name]
    except KeyError:
        raise ValueError(f"unbound variable {term.name}") from None


def holds(omega, alpha: Formula, theta: Mapping[str, str]) -> bool:
    """Truth of the ground formula ``alpha`` under ``theta`` in world ``omega``.

    ``omega`` needs an ``is_true(predicate_name, args)`` method.
    """
    if isinstance(alpha, Atom):
        args = tuple(_ground_term(t, theta) for t in alpha.args)
        return omega.is_true(alpha.predicate.name, args)
    if isinstance(alpha, Equality):
        return _ground_term(alpha.left, theta) == _ground_term(alpha.right, theta)
    if isinstance(alpha, Not):
        return not holds(omega, alpha.operand, theta)
    if isinstance(alpha, And):
        return holds(omega, alpha.left, theta) and holds(omega, alpha.right, theta)
    if isinstance(alpha, Or):
        return holds(omega, alpha.left, theta) or holds(omega, alpha.right, theta)
    raise TypeError(f"not a formula: {alpha!r}")
