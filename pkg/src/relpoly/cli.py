"""``relpoly`` command line.

Exit codes: 0 success (and ``contains`` true), 1 ``contains`` false,
2 parse or validation error, 3 refusal by an enumeration or tuple budget.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .construction import (
    DEFAULT_TUPLE_BUDGET,
    BudgetExceededError,
    polytope_bruteforce,
    polytope_from_queries,
)
from .geometry import contains, format_rational, interiority_margin
from .logic import FormulaSyntaxError
from .maxent import MarginalSpec, learn_from_example, solution_summary, solve_relational_marginal
from .mln import FragmentError, get_engine, mln_to_wfomc, wfomc_brute
from .modelfile import ModelError, ModelFile, load_model
from .worlds import DEFAULT_WORLD_LIMIT, EnumerationLimitError, count_ground_atoms, stat_vector

log = logging.getLogger("relpoly")


def parse_point(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(p.strip()) for p in text.split(",") if p.strip())
    except (ValueError, ZeroDivisionError):
        raise ModelError(f"bad rational vector {text!r}; expected p1/q1,p2/q2,...") from None


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def _check_point(model: ModelFile, point) -> None:
    if len(point) != len(model.formulas):
        raise ModelError(f"point has {len(point)} coordinates but the model has {len(model.formulas)} formulas")


def _polytope(model: ModelFile, args, coords: str = "q"):
    method = getattr(args, "method", None) or "auto"
    if method == "auto":
        enumerable = 2 ** count_ground_atoms(model.signature, model.domain) <= args.limit
        method = "brute" if enumerable else "theorem1"
    if method == "brute":
        return polytope_bruteforce(model.gamma, model.signature, model.domain, coords, args.limit), None
    return polytope_from_queries(model.gamma, model.signature, model.domain, coords, args.engine, args.budget, args.threads)


def cmd_stats(model: ModelFile, args) -> int:
    omega = model.world(args.world)
    ns, qs = stat_vector(model.gamma, omega)
    _emit({"formulas": model.names, "N": list(ns), "Q": [format_rational(q) for q in qs]})
    return 0


def cmd_partition(model: ModelFile, args) -> int:
    mln = model.mln()
    engine = get_engine(args.engine)
    z = engine(mln) if args.engine != "brute" else engine(mln, limit=args.limit)
    _emit({"Z": format_rational(z)})
    return 0


def cmd_wfomc(model: ModelFile, args) -> int:
    problem = mln_to_wfomc(model.mln())
    count = wfomc_brute(problem, model.domain, args.limit)
    _emit({"theory": problem.to_json(), "WFOMC": format_rational(count)})
    return 0


def cmd_polytope(model: ModelFile, args) -> int:
    P, result = _polytope(model, args, args.coords)
    out = P.to_json()
    out.pop("vertices", None)
    _emit(out)
    if args.query_log:
        payload = result.query_log_json() if result is not None else {"queries": [], "method": "brute"}
        Path(args.query_log).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")
    return 0


def cmd_contains(model: ModelFile, args) -> int:
    point = parse_point(args.point)
    _check_point(model, point)
    P, _ = _polytope(model, args)
    inside = contains(P, point)
    _emit({"contains": inside})
    return 0 if inside else 1


def cmd_interior(model: ModelFile, args) -> int:
    point = parse_point(args.point)
    _check_point(model, point)
    P, _ = _polytope(model, args)
    margin = interiority_margin(P, point)
    _emit({"squared_margin": format_rational(margin.squared), "margin": margin.value})
    return 0


def cmd_maxent(model: ModelFile, args) -> int:
    theta = parse_point(args.target) if args.target else model.target_vector()
    _check_point(model, theta)
    spec = MarginalSpec(model.gamma, theta, model.signature, model.domain)
    sol = solve_relational_marginal(spec, args.tol, args.max_iter, args.engine)
    _emit(solution_summary(sol, theta))
    return 0


def cmd_learn(model: ModelFile, args) -> int:
    omega = model.world(args.example)
    sol = learn_from_example(model.gamma, model.signature, model.domain, omega, args.eps, args.max_iter, args.engine)
    _, theta = stat_vector(model.gamma, omega)
    _emit(solution_summary(sol, theta))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relpoly", description="Relational marginal polytopes of Markov logic networks.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("model", help="model file")
    common.add_argument("--limit", type=int, default=DEFAULT_WORLD_LIMIT, help="maximum number of worlds to enumerate")
    common.add_argument("--budget", type=int, default=DEFAULT_TUPLE_BUDGET, help="maximum point tuples for candidate normals")
    common.add_argument("--threads", type=int, default=1, help="worker cap for partition-function queries")
    common.add_argument("--engine", choices=["brute", "lifted1"], default="brute", help="partition-function engine")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", parents=[common], help="N and Q statistics of a world")
    p.add_argument("--world")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("partition", parents=[common], help="exact partition function")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("wfomc", parents=[common], help="translate to WFOMC and count")
    p.set_defaults(func=cmd_wfomc)

    method = argparse.ArgumentParser(add_help=False)
    method.add_argument("--method", choices=["theorem1", "brute", "auto"], default=None)

    p = sub.add_parser("polytope", parents=[common, method], help="facets of the relational marginal polytope")
    p.add_argument("--coords", choices=["n", "q"], default="q")
    p.add_argument("--query-log", help="write the partition-function query log here")
    p.set_defaults(func=cmd_polytope, method="theorem1")

    p = sub.add_parser("contains", parents=[common, method], help="point membership (exit 0 inside, 1 outside)")
    p.add_argument("--point", required=True)
    p.set_defaults(func=cmd_contains)

    p = sub.add_parser("interior", parents=[common, method], help="squared interiority margin of a point")
    p.add_argument("--point", required=True)
    p.set_defaults(func=cmd_interior)

    p = sub.add_parser("maxent", parents=[common], help="solve the relational marginal problem")
    p.add_argument("--target")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=500)
    p.set_defaults(func=cmd_maxent)

    p = sub.add_parser("learn", parents=[common], help="weights from a training world")
    p.add_argument("--example", required=True)
    p.add_argument("--eps", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=500)
    p.set_defaults(func=cmd_learn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        model = load_model(args.model)
        return args.func(model, args)
    except (EnumerationLimitError, BudgetExceededError) as exc:
        print(f"relpoly: refused: {exc}", file=sys.stderr)
        return 3
    except (ModelError, FormulaSyntaxError, FragmentError, OSError, ValueError) as exc:
        print(f"relpoly: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
