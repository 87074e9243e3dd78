"""Relational marginal polytopes of Markov logic networks."""
from .construction import (
    BudgetExceededError,
    construct_irmp,
    enumerate_candidate_normals,
    find_b,
    irmp_from_rmp,
    max_weighted_count,
    polytope_bruteforce,
    polytope_from_queries,
    rmp_from_irmp,
    vertices_bruteforce,
)
from .geometry import Polytope, contains, interiority_margin, minimize_constraints
from .logic import FormulaSyntaxError, Predicate, parse_formula, pretty_print
from .maxent import MarginalSpec, learn_from_example, solve_relational_marginal
from .mln import (
    MLN,
    FragmentError,
    LogRationalWeight,
    mln_to_wfomc,
    partition_z_brute,
    partition_z_lifted_unary,
    wfomc_brute,
)
from .modelfile import ModelError, load_model, parse_model
from .worlds import Domain, EnumerationLimitError, World, enumerate_worlds, n_statistic, q_statistic

__version__ = "0.1.0"
