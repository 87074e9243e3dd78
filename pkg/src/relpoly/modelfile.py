"""Line-oriented model files.

::

    # smokers
    domain 3 A B C
    predicate sm/1
    predicate friends/2
    formula f1: sm(x) & friends(x,y) & sm(y)
    weight f1 2/1
    target f1 1/2
    world w1 { sm(A) friends(A,B) }

``domain N`` alone names the elements 1..N. ``form n|q`` selects the
parameterization of the weights (default n). World blocks may span lines.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .logic import Formula, FormulaSyntaxError, Predicate, parse_formula, parse_predicate
from .mln import MLN, N_FORM, Q_FORM, LogRationalWeight
from .worlds import Domain, World


class ModelError(ValueError):
    def __init__(self, message: str, line: int | None = None, token: str | None = None):
        self.line = line
        self.token = token
        where = f"line {line}: " if line is not None else ""
        tok = f" (near {token!r})" if token else ""
        super().__init__(f"{where}{message}{tok}")


_ATOM_RE = re.compile(r"([a-z][A-Za-z0-9_']*)(?:\(([^()]*)\))?")


@dataclass
class ModelFile:
    domain: Domain | None = None
    signature: list[Predicate] = field(default_factory=list)
    formulas: dict[str, Formula] = field(default_factory=dict)
    weights: dict[str, LogRationalWeight] = field(default_factory=dict)
    targets: dict[str, Fraction] = field(default_factory=dict)
    worlds: dict[str, World] = field(default_factory=dict)
    form: str = N_FORM

    @property
    def gamma(self) -> tuple[Formula, ...]:
        return tuple(self.formulas.values())

    @property
    def names(self) -> list[str]:
        return list(self.formulas)

    def mln(self) -> MLN:
        """Formulas without a weight line get weight ln(1/1) = 0."""
        weights = tuple(self.weights.get(name, LogRationalWeight(1, 1)) for name in self.formulas)
        return MLN(tuple(self.signature), self.domain, self.gamma, weights, self.form)

    def target_vector(self) -> tuple[Fraction, ...]:
        missing = [name for name in self.formulas if name not in self.targets]
        if missing:
            raise ModelError(f"no target for formula(s) {', '.join(missing)}")
        return tuple(self.targets[name] for name in self.formulas)

    def world(self, name: str | None = None) -> World:
        if name is None:
            if len(self.worlds) != 1:
                raise ModelError(f"model has {len(self.worlds)} worlds; name one explicitly")
            return next(iter(self.worlds.values()))
        try:
            return self.worlds[name]
        except KeyError:
            raise ModelError(f"unknown world {name!r}") from None


def _parse_rational(text: str, line: int) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ModelError("bad rational", line, text) from None


def _parse_world_atoms(body: str, model: ModelFile, line: int) -> list[tuple[str, tuple[str, ...]]]:
    sig = {p.name: p for p in model.signature}
    atoms = []
    pos = 0
    body = body.strip()
    while pos < len(body):
        if body[pos].isspace() or body[pos] == ",":
            pos += 1
            continue
        m = _ATOM_RE.match(body, pos)
        if m is None:
            raise ModelError("bad ground atom in world block", line, body[pos:pos + 12])
        name, arg_text = m.group(1), m.group(2)
        args = tuple(a.strip() for a in arg_text.split(",")) if arg_text and arg_text.strip() else ()
        pred = sig.get(name)
        if pred is None:
            raise ModelError("unknown predicate in world block", line, name)
        if len(args) != pred.arity:
            raise ModelError(f"arity mismatch for {pred}", line, m.group(0))
        for a in args:
            if a not in model.domain.elements:
                raise ModelError("constant is not a domain element", line, a)
        atoms.append((name, args))
        pos = m.end()
    return atoms


def parse_model(text: str) -> ModelFile:
    model = ModelFile()
    pending_worlds: dict[str, list] = {}
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        lineno = i + 1
        raw = lines[i].split("#", 1)[0].strip()
        i += 1
        if not raw:
            continue
        keyword, _, rest = raw.partition(" ")
        rest = rest.strip()
        if keyword == "domain":
            parts = rest.split()
            if not parts or not parts[0].isdigit() or int(parts[0]) < 1:
                raise ModelError("domain needs a positive size", lineno, parts[0] if parts else None)
            n = int(parts[0])
            names = parts[1:] or None
            try:
                model.domain = Domain.of_size(n, names)
            except ValueError as exc:
                raise ModelError(str(exc), lineno) from None
        elif keyword == "predicate":
            try:
                pred = parse_predicate(rest)
            except FormulaSyntaxError:
                raise ModelError("bad predicate declaration, expected name/arity", lineno, rest) from None
            if any(p.name == pred.name for p in model.signature):
                raise ModelError("predicate declared twice", lineno, pred.name)
            model.signature.append(pred)
        elif keyword == "form":
            if rest.lower() not in ("n", "q"):
                raise ModelError("form must be n or q", lineno, rest)
            model.form = N_FORM if rest.lower() == "n" else Q_FORM
        elif keyword == "formula":
            name, colon, body = rest.partition(":")
            name = name.strip()
            if not colon or not name:
                raise ModelError("expected 'formula NAME: TEXT'", lineno, rest)
            if name in model.formulas:
                raise ModelError("formula name used twice", lineno, name)
            try:
                model.formulas[name] = parse_formula(body, model.signature)
            except FormulaSyntaxError as exc:
                # the message already names the offending token
                err = ModelError(f"formula {name}: {exc}", lineno)
                err.token = exc.token
                raise err from None
            if model.domain is not None:
                for c in model.formulas[name].constants:
                    if c not in model.domain.elements:
                        raise ModelError("constant is not a domain element", lineno, c)
        elif keyword in ("weight", "target"):
            parts = rest.split()
            if len(parts) != 2:
                raise ModelError(f"expected '{keyword} FORMULA VALUE'", lineno, rest)
            name, value = parts
            if name not in model.formulas:
                raise ModelError("unknown formula", lineno, name)
            if keyword == "weight":
                try:
                    model.weights[name] = LogRationalWeight.parse(value)
                except ValueError:
                    raise ModelError("weight must be a/b with positive integers", lineno, value) from None
            else:
                t = _parse_rational(value, lineno)
                if not 0 <= t <= 1:
                    raise ModelError("target must lie in [0, 1]", lineno, value)
                model.targets[name] = t
        elif keyword == "world":
            if model.domain is None:
                raise ModelError("world block before domain declaration", lineno)
            name, brace, body = rest.partition("{")
            name = name.strip()
            if not brace or not name:
                raise ModelError("expected 'world NAME { atoms }'", lineno, rest)
            while "}" not in body:
                if i >= len(lines):
                    raise ModelError("unterminated world block", lineno, name)
                body += " " + lines[i].split("#", 1)[0]
                i += 1
            body, _, trailing = body.partition("}")
            if trailing.strip():
                raise ModelError("text after world block", lineno, trailing.strip())
            if name in pending_worlds:
                raise ModelError("world name used twice", lineno, name)
            pending_worlds[name] = _parse_world_atoms(body, model, lineno)
        else:
            raise ModelError("unknown directive", lineno, keyword)
    if model.domain is None:
        raise ModelError("missing domain declaration")
    # worlds are built once the whole signature is known
    for name, atoms in pending_worlds.items():
        model.worlds[name] = World.from_atoms(tuple(model.signature), model.domain, atoms)
    return model


def load_model(path: str | Path) -> ModelFile:
    return parse_model(Path(path).read_text(encoding="utf-8"))
