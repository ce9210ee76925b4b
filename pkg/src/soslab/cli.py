"""Command-line front end.

Subcommands: generate, estimate, certify, solve, experiment. Values print to
stdout with 17 significant digits; reports print as one JSON object. Usage
errors exit 2 (argparse); numeric or model failures print one JSON error
line to stderr and exit 1.
"""
from __future__ import annotations

import argparse
import json
import sys

from .certificate import (
    BINARY_ONE,
    SIGN_POSITIVE,
    build_certificate,
    certificate_objective,
    expansivity_table,
    positivity_graph,
    report_to_json_dict,
    verify_certificate,
    with_objective,
    DEFAULT_MAX_CLIQUE_COMBOS,
)
from .errors import SoslabError
from .estimators import (
    BRANCH_AND_BOUND,
    DEFAULT_MAX_SUBSETS,
    EXHAUSTIVE,
    avg_estimate,
    lp_estimate,
    max_estimate,
    scan_estimate,
)
from .lab import ExperimentConfig, fmt_float, run_experiment, with_overrides
from .matrix import read_matrix_json, write_matrix_json
from .models import GAUSSIAN, RADEMACHER, SBM, SUBMATRIX, ModelParams, Noise, generate
from .sdp import MAX_ITER_REACHED, SolverOptions, solve
from .sos import assemble_basic, assemble_level

_MODES = {"sign": SIGN_POSITIVE, "binary": BINARY_ONE}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="soslab",
        description="Planted-structure models, scan estimators, SoS relaxations, "
        "and expansivity certificates at desk scale.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="draw a planted instance and write matrix JSON")
    gen.add_argument("--model", choices=[SUBMATRIX, SBM], required=True)
    gen.add_argument("--d", type=int, required=True)
    gen.add_argument("--s", type=int, required=True, help="planted subset size")
    gen.add_argument("--beta", type=float, required=True, help="signal strength")
    gen.add_argument("--noise", choices=[GAUSSIAN, RADEMACHER], default=GAUSSIAN)
    gen.add_argument("--sigma", type=float, default=1.0, help="gaussian scale (0 = noiseless)")
    gen.add_argument("--nu", type=float, default=1.0, help="two-point noise scale")
    gen.add_argument("--beta-tilde", type=float, default=None, help="sbm outside probability")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)

    est = sub.add_parser("estimate", help="run one estimator on a matrix file")
    est.add_argument("--in", dest="infile", required=True)
    est.add_argument(
        "--estimator",
        choices=["scan", "avg", "max", "lp", "sos_basic", "sos_level"],
        required=True,
    )
    est.add_argument("--s", type=int, default=None)
    est.add_argument("--level", type=int, default=1, help="level for sos_level")
    est.add_argument("--strategy", choices=[EXHAUSTIVE, BRANCH_AND_BOUND], default=EXHAUSTIVE)
    est.add_argument("--max-subsets", type=int, default=DEFAULT_MAX_SUBSETS)
    est.add_argument("--tol", type=float, default=1e-7)
    est.add_argument("--max-iter", type=int, default=100_000)
    est.add_argument("--step", type=float, default=1.0)

    cert = sub.add_parser("certify", help="build and verify the expansivity certificate")
    cert.add_argument("--in", dest="infile", required=True)
    cert.add_argument("--level", type=int, required=True)
    cert.add_argument("--s", type=int, required=True)
    cert.add_argument("--mode", choices=sorted(_MODES), required=True)
    cert.add_argument("--max-combos", type=int, default=DEFAULT_MAX_CLIQUE_COMBOS)

    slv = sub.add_parser("solve", help="solve a relaxation on a matrix file")
    slv.add_argument("--in", dest="infile", required=True)
    group = slv.add_mutually_exclusive_group(required=True)
    group.add_argument("--level", type=int, default=None, help="level of the moment relaxation")
    group.add_argument("--basic", action="store_true", help="the weaker (d+1)-dim program")
    slv.add_argument("--s", type=int, required=True, help="subset size in the constraints")
    slv.add_argument("--tol", type=float, default=1e-7)
    slv.add_argument("--max-iter", type=int, default=100_000)
    slv.add_argument("--step", type=float, default=1.0)

    exp = sub.add_parser("experiment", help="run a configured experiment to CSV")
    exp.add_argument("--config", required=True)
    exp.add_argument("--out", default=None, help="override the config's output path")
    exp.add_argument("--seed", type=int, default=None, help="override the config's base seed")

    return parser


def _cmd_generate(args) -> int:
    noise = None
    if args.model == SUBMATRIX:
        scale = args.sigma if args.noise == GAUSSIAN else args.nu
        noise = Noise(kind=args.noise, scale=scale)
    params = ModelParams(
        kind=args.model,
        d=args.d,
        s_star=args.s,
        beta_star=args.beta,
        noise=noise,
        beta_tilde=args.beta_tilde,
        seed=args.seed,
    )
    instance = generate(params)
    write_matrix_json(args.out, instance.matrix, instance.ground_truth_dict())
    return 0


def _cmd_estimate(args) -> int:
    X, _ = read_matrix_json(args.infile)
    name = args.estimator
    if name != "max" and args.s is None:
        raise SoslabError(f"estimator {name!r} requires --s")
    if name == "scan":
        value = scan_estimate(X, args.s, strategy=args.strategy, max_subsets=args.max_subsets).value
    elif name == "avg":
        value = avg_estimate(X, args.s)
    elif name == "max":
        value = max_estimate(X)
    elif name == "lp":
        value = lp_estimate(X, args.s)
    else:
        options = SolverOptions(tol=args.tol, max_iter=args.max_iter, step=args.step)
        program = (
            assemble_basic(X, args.s)
            if name == "sos_basic"
            else assemble_level(X, args.s, args.level)
        )
        value = solve(program, options).value
    print(fmt_float(value))
    return 0


def _cmd_certify(args) -> int:
    X, _ = read_matrix_json(args.infile)
    graph = positivity_graph(X, _MODES[args.mode])
    table = expansivity_table(graph, args.level, max_combos=args.max_combos)
    pe = build_certificate(table, args.s, args.level)
    report = verify_certificate(pe, X.d, args.s, args.level)
    report = with_objective(report, certificate_objective(X, pe, args.s))
    print(json.dumps(report_to_json_dict(report)))
    return 0


def _cmd_solve(args) -> int:
    X, _ = read_matrix_json(args.infile)
    program = assemble_basic(X, args.s) if args.basic else assemble_level(X, args.s, args.level)
    options = SolverOptions(tol=args.tol, max_iter=args.max_iter, step=args.step)
    solution = solve(program, options)
    if solution.status == MAX_ITER_REACHED:
        print(
            f"warning: max_iter reached (primal={solution.primal_residual:.3g}, "
            f"dual={solution.dual_residual:.3g})",
            file=sys.stderr,
        )
    print(fmt_float(solution.value))
    return 0


def _cmd_experiment(args) -> int:
    cfg = ExperimentConfig.from_json(args.config)
    cfg = with_overrides(cfg, output=args.out, base_seed=args.seed)
    for path in run_experiment(cfg):
        print(path)
    return 0


_HANDLERS = {
    "generate": _cmd_generate,
    "estimate": _cmd_estimate,
    "certify": _cmd_certify,
    "solve": _cmd_solve,
    "experiment": _cmd_experiment,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (SoslabError, OSError, ValueError, KeyError) as exc:
        line = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(line), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
