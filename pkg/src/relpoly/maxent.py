"""Maximum-entropy relational marginals through the exponential-family dual.

The dual objective is ``g(w) = theta . w - log Z(w)`` with Q-form weights
``w`` (world probability proportional to ``exp(sum_i w_i Q_i)``). It is
concave with gradient ``theta - E_w[Q]`` and Hessian ``-Cov_w[Q]``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .construction import polytope_bruteforce, polytope_from_queries
from .geometry import Margin, Polytope, format_rational, interiority_margin
from .logic import Formula
from .mln import MLN, LogRationalWeight, unary_configurations
from .worlds import DEFAULT_WORLD_LIMIT, Domain, World, as_signature, count_ground_atoms, grounding_count, n_histogram, stat_vector

log = logging.getLogger(__name__)

CONVERGED = "Converged"
NOT_INTERIOR = "NotInterior"
ITERATION_LIMIT = "IterationLimit"

# per-grounding (N-form) weight magnitude treated as divergence
DIVERGENCE_BOUND = 50.0
# per-grounding Newton step below which a small gradient counts as converged
STEP_TOL = 1e-4


@dataclass(frozen=True)
class MarginalSpec:
    formulas: tuple[Formula, ...]
    theta: tuple[Fraction, ...]
    signature: tuple
    domain: Domain

    def __post_init__(self):
        object.__setattr__(self, "formulas", tuple(self.formulas))
        object.__setattr__(self, "theta", tuple(Fraction(t) for t in self.theta))
        object.__setattr__(self, "signature", as_signature(self.signature))
        if len(self.formulas) != len(self.theta):
            raise ValueError("one target per formula required")
        for t in self.theta:
            if not 0 <= t <= 1:
                raise ValueError(f"target {t} outside [0, 1]")


@dataclass
class MaxEntSolution:
    weights: np.ndarray  # Q-form
    log_z: float
    moments: np.ndarray
    dual_value: float
    status: str
    trace: list[float] = field(default_factory=list)
    iterations: int = 0
    margin: Margin | None = None
    scales: tuple[int, ...] = ()

    @property
    def n_weights(self) -> np.ndarray:
        """Per-grounding (N-form) weights."""
        return self.weights / np.asarray(self.scales, dtype=float)

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "weights_q": [float(w) for w in self.weights],
            "weights_n": [float(w) for w in self.n_weights],
            "moments": [float(m) for m in self.moments],
            "log_z": float(self.log_z),
            "dual_value": float(self.dual_value),
            "iterations": self.iterations,
        }
        if self.margin is not None:
            out["interiority"] = self.margin.to_json()
        return out


def _logsumexp(x: np.ndarray) -> float:
    """log sum exp(x), accurate also when one term dominates."""
    k = int(np.argmax(x))
    m = x[k]
    rest = np.exp(np.delete(x, k) - m).sum()
    return float(m + np.log1p(rest))


def _shifted_moments(p: np.ndarray, d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """E[d] and Cov[d] for rows d (statistics minus the target).

    Working relative to the target keeps E[Q] - theta accurate when the
    target sits next to a vertex, where 1 - p would round to zero.
    """
    shift = p @ d
    second = (d * p[:, None]).T @ d
    return shift, second - np.outer(shift, shift)


class BruteStatistics:
    """log Z - center . w, E[Q] - center and Cov[Q] from the histogram of
    Q-vectors over all worlds."""

    def __init__(self, formulas, signature, domain: Domain, limit: int = DEFAULT_WORLD_LIMIT):
        hist = n_histogram(formulas, signature, domain, limit)
        scales = np.array([grounding_count(f, domain) for f in formulas], dtype=float)
        self.q = np.array([n for n, _ in hist], dtype=float).reshape(len(hist), len(formulas)) / scales
        self.log_counts = np.log(np.array([c for _, c in hist], dtype=float))

    def __call__(self, w: np.ndarray, center: np.ndarray):
        d = self.q - center
        logits = self.log_counts + d @ w
        shifted_log_z = _logsumexp(logits)
        p = np.exp(logits - shifted_log_z)
        return (shifted_log_z,) + _shifted_moments(p, d)


class LiftedUnaryStatistics:
    """The same quantities for one-variable unary formulas, in O(2^#unary preds).

    With n elements, log Z = n log z1 + const and every Q_i is the mean of n
    independent per-element indicators, so E[Q] is the per-element mean and
    Cov[Q] the per-element covariance divided by n.
    """

    def __init__(self, formulas, signature, domain: Domain):
        probe = MLN(signature, domain, formulas, tuple(LogRationalWeight(1) for _ in formulas))
        self.flags = np.array([flags for _, flags in unary_configurations(probe)], dtype=float)
        self.flags = self.flags.reshape(-1, len(formulas))
        self.n = domain.size
        other = sum(domain.size ** p.arity for p in signature if p.arity != 1)
        self.const = other * math.log(2)

    def __call__(self, w: np.ndarray, center: np.ndarray):
        d = self.flags - center
        logits = d @ (w / self.n)
        log_z1 = _logsumexp(logits)
        p = np.exp(logits - log_z1)
        shift, cov = _shifted_moments(p, d)
        return self.n * log_z1 + self.const, shift, cov / self.n


def make_statistics(formulas, signature, domain: Domain, engine: str = "brute"):
    if engine == "brute":
        return BruteStatistics(formulas, signature, domain)
    if engine == "lifted1":
        return LiftedUnaryStatistics(formulas, signature, domain)
    raise ValueError(f"unknown engine {engine!r}")


def dual_objective(theta: np.ndarray, w: np.ndarray, stats) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    """(g(w), gradient, moments, covariance).

    ``stats`` reports log Z - theta . w directly, which avoids cancellation
    when both terms are large.
    """
    shifted_log_z, shift, cov = stats(w, theta)
    return -shifted_log_z, -shift, theta + shift, cov


def solve_relational_marginal(
    spec: MarginalSpec,
    tol: float = 1e-8,
    max_iter: int = 500,
    engine: str = "brute",
    w0: Sequence[float] | None = None,
) -> MaxEntSolution:
    """Maximize the dual by damped Newton ascent with Armijo backtracking.

    The step direction is Cov^+ (theta - E[Q]), an ascent direction for the
    concave dual; plain gradient ascent is the fallback when it is not.
    Convergence needs both a gradient within ``tol`` and a Newton step below
    STEP_TOL per grounding. Targets on the boundary of the polytope drive the
    weights off with steps of roughly constant size, and the status becomes
    NotInterior once a per-grounding weight exceeds DIVERGENCE_BOUND.
    """
    theta = np.array([float(t) for t in spec.theta])
    scales = tuple(grounding_count(f, spec.domain) for f in spec.formulas)
    scale_arr = np.asarray(scales, dtype=float)
    stats = make_statistics(spec.formulas, spec.signature, spec.domain, engine)
    w = np.zeros(len(theta)) if w0 is None else np.array(w0, dtype=float)
    g, grad, mean, cov = dual_objective(theta, w, stats)
    trace = [g]
    status = ITERATION_LIMIT
    for _ in range(max_iter):
        direction = np.linalg.lstsq(cov, grad, rcond=1e-12)[0]
        # a small gradient with a large Newton step means the optimum is far away
        if np.max(np.abs(grad), initial=0.0) <= tol and np.max(np.abs(direction) / scale_arr, initial=0.0) <= STEP_TOL:
            status = CONVERGED
            break
        slope = float(grad @ direction)
        if not slope > 0:
            direction, slope = grad, float(grad @ grad)
        step = 1.0
        while step >= 1e-12:
            w_new = w + step * direction
            g_new, grad_new, mean_new, cov_new = dual_objective(theta, w_new, stats)
            if g_new >= g + 1e-4 * step * slope:
                break
            step *= 0.5
        else:
            # float resolution reached without meeting tol
            break
        w, g, grad, mean, cov = w_new, g_new, grad_new, mean_new, cov_new
        trace.append(g)
        if np.max(np.abs(w) / scale_arr, initial=0.0) > DIVERGENCE_BOUND:
            status = NOT_INTERIOR
            break
    it = len(trace) - 1
    log_z = stats(w, theta)[0] + float(theta @ w)
    log.info("maxent finished: %s after %d iterations", status, it)
    return MaxEntSolution(w, float(log_z), mean, g, status, trace, it, None, scales)


def learn_from_example(
    gamma: Sequence[Formula],
    signature,
    domain: Domain,
    example: World,
    eps: float = 1e-8,
    max_iter: int = 500,
    engine: str = "brute",
    polytope: Polytope | None = None,
) -> MaxEntSolution:
    """Weights maximizing the likelihood of one training world.

    The targets are the example's Q-statistics. The interiority margin of
    those targets in the relational marginal polytope is attached to the
    solution; the polytope is built by brute force when the worlds can be
    enumerated and from partition-function queries otherwise, unless given.
    """
    _, theta = stat_vector(gamma, example)
    spec = MarginalSpec(tuple(gamma), theta, signature, domain)
    sol = solve_relational_marginal(spec, eps, max_iter, engine)
    if polytope is None:
        if 2 ** count_ground_atoms(spec.signature, domain) <= DEFAULT_WORLD_LIMIT:
            polytope = polytope_bruteforce(gamma, spec.signature, domain, "q")
        else:
            polytope, _ = polytope_from_queries(gamma, spec.signature, domain, "q", engine)
    sol.margin = interiority_margin(polytope, theta)
    return sol


def solution_summary(sol: MaxEntSolution, theta: Sequence[Fraction]) -> dict:
    out = sol.to_json()
    out["target"] = [format_rational(t) for t in theta]
    return out
