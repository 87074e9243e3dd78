import math
from fractions import Fraction

import numpy as np
import pytest

from helpers import edges_triangles, formulas, sig
from relpoly.maxent import (
    CONVERGED,
    ITERATION_LIMIT,
    NOT_INTERIOR,
    MarginalSpec,
    dual_objective,
    learn_from_example,
    make_statistics,
    solve_relational_marginal,
)
from relpoly.mln import MLN, LogRationalWeight, expected_q
from relpoly.worlds import Domain, World

S = sig("sm/1")
AB = Domain(("A", "B"))
SM = formulas(S, "sm(x)")


def spec(theta, gamma=SM, s=S, d=AB):
    return MarginalSpec(gamma, theta, s, d)


def test_symmetric_target():
    sol = solve_relational_marginal(spec((Fraction(1, 2),)))
    assert sol.status == CONVERGED
    assert abs(sol.weights[0]) < 1e-9
    assert sol.moments[0] == pytest.approx(0.5, abs=1e-12)
    assert sol.log_z == pytest.approx(math.log(4))


def test_three_quarters_matches_closed_form():
    sol = solve_relational_marginal(spec((Fraction(3, 4),)))
    assert sol.status == CONVERGED
    assert sol.n_weights[0] == pytest.approx(math.log(3), abs=1e-6)
    assert sol.weights[0] == pytest.approx(2 * math.log(3), abs=1e-6)
    # the exact expectation under the rounded weight is 3/4 as well
    assert float(expected_q(MLN(S, AB, SM, (LogRationalWeight(3),)))[0]) == pytest.approx(sol.moments[0], abs=1e-8)


@pytest.mark.parametrize("theta", [Fraction(0), Fraction(1)])
def test_boundary_targets_diverge(theta):
    sol = solve_relational_marginal(spec((theta,)))
    assert sol.status == NOT_INTERIOR


def test_near_boundary_still_converges():
    sol = solve_relational_marginal(spec((Fraction(1, 10 ** 6),)))
    assert sol.status == CONVERGED
    assert sol.moments[0] == pytest.approx(1e-6, rel=1e-6)


def test_iteration_limit_reported():
    sol = solve_relational_marginal(spec((Fraction(9, 10),)), max_iter=1)
    assert sol.status == ITERATION_LIMIT


def test_trace_is_monotone():
    s = sig("sm/1", "fr/2")
    gamma = formulas(s, "sm(x)", "fr(x,y) & sm(y)")
    sol = solve_relational_marginal(spec((Fraction(2, 5), Fraction(1, 5)), gamma, s, Domain.of_size(2)))
    assert sol.status == CONVERGED
    assert all(b >= a - 1e-12 for a, b in zip(sol.trace, sol.trace[1:]))
    assert np.max(np.abs(sol.moments - [0.4, 0.2])) < 1e-8


def test_gradient_matches_finite_differences():
    s = sig("p/1", "fr/2")
    gamma = formulas(s, "p(x) | fr(x,y)", "fr(x,x)", "p(y) & !fr(y,x)")
    theta = np.array([0.6, 0.3, 0.2])
    stats = make_statistics(gamma, s, Domain.of_size(2))
    rng = np.random.default_rng(0)
    h = 1e-5
    for _ in range(5):
        w = rng.normal(size=3)
        _, grad, _, cov = dual_objective(theta, w, stats)
        fd = np.array([(dual_objective(theta, w + h * e, stats)[0] - dual_objective(theta, w - h * e, stats)[0]) / (2 * h) for e in np.eye(3)])
        assert np.allclose(fd, grad, rtol=1e-5, atol=1e-9)
        # Hessian of the dual is minus the covariance
        fd_h = np.array([(dual_objective(theta, w + h * e, stats)[1] - dual_objective(theta, w - h * e, stats)[1]) / (2 * h) for e in np.eye(3)])
        assert np.allclose(fd_h, -cov, atol=1e-6)


def test_duplicate_formula_keeps_moments():
    s = sig("sm/1")
    one = solve_relational_marginal(spec((Fraction(2, 3),)))
    two = solve_relational_marginal(spec((Fraction(2, 3), Fraction(2, 3)), formulas(s, "sm(x)", "sm(x)")))
    assert two.status == CONVERGED
    assert np.allclose(two.moments, [one.moments[0]] * 2, atol=1e-8)
    assert sum(two.weights) == pytest.approx(one.weights[0], abs=1e-6)


def test_lifted_and_brute_engines_agree():
    s = sig("p/1", "q/1")
    gamma = formulas(s, "p(x) & q(x)", "!p(x) | q(x)")
    d = Domain.of_size(3)
    sp = spec((Fraction(1, 3), Fraction(2, 3)), gamma, s, d)
    a = solve_relational_marginal(sp, engine="brute")
    b = solve_relational_marginal(sp, engine="lifted1")
    assert a.status == b.status == CONVERGED
    assert np.allclose(a.weights, b.weights, atol=1e-6)
    assert a.log_z == pytest.approx(b.log_z, abs=1e-9)


def test_lifted_engine_large_domain():
    sol = solve_relational_marginal(spec((Fraction(3, 4),), SM, S, Domain.of_size(500)), engine="lifted1")
    assert sol.status == CONVERGED
    assert sol.n_weights[0] == pytest.approx(math.log(3), abs=1e-6)


def test_spec_validation():
    with pytest.raises(ValueError):
        spec((Fraction(3, 2),))
    with pytest.raises(ValueError):
        spec((Fraction(1, 2), Fraction(1, 2)))


def test_learn_half_world():
    omega = World.from_atoms(S, AB, [("sm", ("A",))])
    sol = learn_from_example(SM, S, AB, omega)
    assert sol.status == CONVERGED
    assert abs(sol.weights[0]) < 1e-9
    assert sol.margin.squared == Fraction(1, 4)


def test_learn_complete_world_is_vertex():
    sol = learn_from_example(SM, S, AB, World.complete(S, AB))
    assert sol.status == NOT_INTERIOR
    assert sol.margin.squared == 0


def test_learn_edges_triangles_mixed_world():
    s, gamma, d = edges_triangles(3)
    edges = [("1", "2"), ("2", "3"), ("3", "1"), ("1", "1")]
    omega = World.from_atoms(s, d, [("friends", e) for e in edges])
    sol = learn_from_example(gamma, s, d, omega, eps=1e-9)
    assert sol.status == CONVERGED
    assert np.max(np.abs(sol.moments - [4 / 9, 4 / 27])) <= 1e-8
    assert sol.margin.squared > 0
    # the learned weights reproduce the moments under exact expectations too
    weights = tuple(LogRationalWeight.from_ratio(Fraction(math.exp(w)).limit_denominator(10 ** 9)) for w in sol.n_weights)
    exact = expected_q(MLN(s, d, gamma, weights))
    assert np.allclose([float(x) for x in exact], [4 / 9, 4 / 27], atol=1e-6)
