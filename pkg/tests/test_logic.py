import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import sig
from relpoly.logic import (
    And,
    Atom,
    Constant,
    Equality,
    FormulaSyntaxError,
    Not,
    Or,
    Predicate,
    Variable,
    grounding_substitutions,
    holds,
    parse_formula,
    parse_predicate,
    pretty_print,
)
from relpoly.worlds import Domain, World

SIG = sig("sm/1", "friends/2", "p/0")


def test_single_atom():
    f = parse_formula("sm(x)", SIG)
    assert f == Atom(Predicate("sm", 1), (Variable("x"),))
    assert f.variables == ("x",)


def test_conjunction_tree_and_variable_order():
    f = parse_formula("sm(x) & friends(x,y) & sm(y)", SIG)
    assert isinstance(f, And)
    assert f.variables == ("x", "y")


@pytest.mark.parametrize("text", ["forall x: sm(x)", "exists y friends(x,y)", "∀x sm(x)"])
def test_quantifiers_rejected(text):
    with pytest.raises(FormulaSyntaxError):
        parse_formula(text, SIG)


@pytest.mark.parametrize(
    "text",
    ["sm(x) &", "sm(x,y)", "unknown(x)", "sm(x", "(sm(x)", "sm(x) | | sm(y)", "friends(x)", ""],
)
def test_syntax_errors(text):
    with pytest.raises(FormulaSyntaxError):
        parse_formula(text, SIG)


def test_precedence_not_and_or():
    f = parse_formula("!sm(x) & sm(y) | p", SIG)
    assert isinstance(f, Or)
    assert isinstance(f.left, And)
    assert isinstance(f.left.left, Not)


def test_constants_and_equality():
    f = parse_formula("x = A | friends(B, 3)", SIG)
    assert f.variables == ("x",)
    assert set(f.constants) == {"A", "B", "3"}
    assert isinstance(f.left, Equality)


def test_parse_predicate():
    assert parse_predicate("friends/2") == Predicate("friends", 2)
    with pytest.raises(FormulaSyntaxError):
        parse_predicate("friends")


def test_grounding_counts():
    d2 = Domain.of_size(2)
    assert len(grounding_substitutions(parse_formula("sm(x)", SIG), d2)) == 2
    assert len(grounding_substitutions(parse_formula("friends(x,y)", SIG), d2)) == 4
    assert grounding_substitutions(parse_formula("sm(A)", SIG), Domain(("A", "B"))) == [{}]


def test_holds_atoms_and_equality():
    d = Domain(("A", "B"))
    s = sig("sm/1")
    omega = World.from_atoms(s, d, [("sm", ("A",))])
    f = parse_formula("sm(x)", s)
    assert holds(omega, f, {"x": "A"})
    assert not holds(omega, f, {"x": "B"})
    assert holds(omega, parse_formula("x = y", s), {"x": "A", "y": "A"})
    with pytest.raises(ValueError):
        holds(omega, f, {})


# random formulas for the round trip
_atoms = st.sampled_from(["sm(x)", "sm(y)", "friends(x,y)", "friends(y,A)", "p", "x = y", "x = A"])


def _formula_text():
    return st.recursive(
        _atoms,
        lambda inner: st.one_of(
            inner.map(lambda t: f"!({t})"),
            st.tuples(inner, inner).map(lambda p: f"({p[0]}) & ({p[1]})"),
            st.tuples(inner, inner).map(lambda p: f"({p[0]}) | ({p[1]})"),
        ),
        max_leaves=8,
    )


@settings(max_examples=200, deadline=None)
@given(_formula_text())
def test_pretty_print_round_trip(text):
    f = parse_formula(text, SIG)
    printed = pretty_print(f)
    assert parse_formula(printed, SIG) == f
    assert pretty_print(parse_formula(printed, SIG)) == printed


def test_pretty_print_minimal_parentheses():
    f = parse_formula("(sm(x) & sm(y)) | !(friends(x,y) | p)", SIG)
    assert pretty_print(f) == "sm(x) & sm(y) | !(friends(x,y) | p)"


def test_node_constructors():
    x = Variable("x")
    f = And(Atom(Predicate("sm", 1), (x,)), Not(Equality(x, Constant("A"))))
    assert f.variables == ("x",)
    assert f.constants == ("A",)
