"""Command-line interface.

Verbs: rank, evaluate, sweep, permute, simulate, compare. Reports are written
as JSON (stdout, or --out) with companion CSV tables and matplotlib figures
rendered next to --out. Exit codes: 0 success, 1 validation/usage error,
2 computation failure (non-convergence, disconnected chain). Diagnostics go
to standard error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .bradley_terry import BtConfig
from .core import (
    Algorithm,
    ConvergenceError,
    Dataset,
    DatasetParseError,
    DatasetValidationError,
    load_dataset,
    save_dataset,
)
from .core import split_dataset
from .elo import EloConfig
from .experiments import (
    AlgorithmConfigs,
    DEFAULT_GRIDS,
    SweepSpec,
    _transitivity_summary,
    compare_algorithms,
    comparison_sections,
    document,
    evaluation_sections,
    fit_ranking,
    parse_algorithm,
    permutation_section,
    ranking_document,
    run_permutation_study,
    run_sweep,
    sweep_section,
    to_json_text,
    write_report,
)
from .figures import render_report_figures
from .glicko import GlickoConfig
from .markov import (
    DisconnectedChainError,
    MarkovConfig,
    build_transition,
    dump_matrix,
    smooth_transition,
    stationary,
)
from .metrics import enumerate_triples, predict_f1
from .simulator import STYLES, SimConfig, generate, save_ground_truth

_ALGORITHM_NAMES = [a.value for a in Algorithm]
_SWEEP_PARAMETER = {
    Algorithm.ELO: "k",
    Algorithm.MARKOV: "p",
    Algorithm.GLICKO: "initial_rd",
}


class _Parser(argparse.ArgumentParser):
    """argparse with exit code 1 on usage errors (2 is reserved for math failures)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_io_arguments(parser, *, with_input=True):
    if with_input:
        parser.add_argument("--input", required=True, help="dataset file to read")
        parser.add_argument(
            "--format", choices=["csv", "jsonl"], default=None,
            help="dataset format (default: inferred from the file suffix)",
        )
    parser.add_argument("--out", default=None, help="write output here instead of stdout")
    parser.add_argument("--seed", type=int, default=0, help="seed (default 0)")
    parser.add_argument(
        "--no-figures", action="store_true",
        help="skip rendering figures next to --out",
    )


def _add_config_arguments(parser):
    group = parser.add_argument_group("algorithm hyperparameters")
    group.add_argument("--k", type=float, default=4.0, help="Elo k-factor (default 4)")
    group.add_argument(
        "--initial-rating", type=float, default=None,
        help="starting rating (default 1000 for Elo, 1500 for Glicko)",
    )
    group.add_argument(
        "--permutations", type=int, default=0,
        help="Elo: average over this many shuffled passes (default 0 = given order)",
    )
    group.add_argument("--max-iters", type=int, default=1000,
                       help="Bradley-Terry iteration budget (default 1000)")
    group.add_argument("--tolerance", type=float, default=1e-8,
                       help="Bradley-Terry max logit change per iteration (default 1e-8)")
    group.add_argument("--weighted", action="store_true",
                       help="Bradley-Terry: weight pairs by inverse match count")
    group.add_argument("--regularization", type=float, default=1e-6,
                       help="Bradley-Terry pseudo-count epsilon (default 1e-6)")
    group.add_argument("--initial-rd", type=float, default=350.0,
                       help="Glicko initial rating deviation (default 350)")
    group.add_argument("--min-rd", type=float, default=30.0,
                       help="Glicko rating deviation floor (default 30)")
    group.add_argument("--p", type=float, default=0.8,
                       help="Markov walker bias in (0.5, 1) (default 0.8)")
    group.add_argument("--power-tol", type=float, default=1e-12,
                       help="Markov power-iteration L1 tolerance (default 1e-12)")
    group.add_argument("--max-power-iters", type=int, default=100000,
                       help="Markov power-iteration budget (default 100000)")
    group.add_argument("--smoothing", type=float, default=0.0,
                       help="Markov uniform smoothing epsilon for disconnected graphs (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pairrank", description=__doc__)
    parser.add_argument("--version", action="version", version=f"pairrank {__version__}")
    verbs = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    rank = verbs.add_parser("rank", help="fit one algorithm on a dataset")
    _add_io_arguments(rank)
    rank.add_argument("--algorithm", required=True, help=f"one of {_ALGORITHM_NAMES}")
    rank.add_argument("--dump-matrix", default=None,
                      help="Markov only: write the transition matrix to this path")
    _add_config_arguments(rank)

    evaluate = verbs.add_parser(
        "evaluate", help="split, fit one algorithm, report transitivity and F1"
    )
    _add_io_arguments(evaluate)
    evaluate.add_argument("--algorithm", required=True, help=f"one of {_ALGORITHM_NAMES}")
    evaluate.add_argument("--train-fraction", type=float, default=0.75,
                          help="train fraction in (0, 1) (default 0.75)")
    _add_config_arguments(evaluate)

    sweep = verbs.add_parser("sweep", help="hyperparameter sweep over a fixed split")
    _add_io_arguments(sweep)
    sweep.add_argument("--algorithm", required=True,
                       help="one of elo, markov, glicko")
    sweep.add_argument("--parameter", default=None,
                       help="parameter to sweep (default: k / p / initial_rd per algorithm)")
    sweep.add_argument(
        "--values", default=None,
        help="explicit 'v1,v2,...' or linear grid 'min:max:count' "
             "(default: the algorithm's standard 100-point grid)",
    )
    sweep.add_argument("--repeats", type=int, default=1,
                       help="runs per point with fresh sub-seeds (default 1)")
    _add_config_arguments(sweep)

    permute = verbs.add_parser(
        "permute", help="Elo rank-stability grid over k-factors and permutation counts"
    )
    _add_io_arguments(permute)
    permute.add_argument("--k-values", default="3,5",
                         help="comma-separated k-factors (default '3,5')")
    permute.add_argument("--permutation-counts", default="1,10,100,1000",
                         help="comma-separated pass counts (default '1,10,100,1000')")

    simulate = verbs.add_parser("simulate", help="generate a synthetic tournament")
    _add_io_arguments(simulate, with_input=False)
    simulate.add_argument("--n-competitors", type=int, required=True)
    simulate.add_argument("--n-matches", type=int, required=True)
    simulate.add_argument("--style", choices=list(STYLES), default="controlled")
    simulate.add_argument("--skew-alpha", type=float, default=1.2,
                          help="arena popularity skew exponent (default 1.2)")
    simulate.add_argument("--tie-rate", type=float, default=0.0,
                          help="probability of overriding an outcome to a tie (default 0)")
    simulate.add_argument("--true-logits", default=None,
                          help="comma-separated ground-truth logits (default: even grid on [-2, 2])")
    simulate.add_argument("--out-format", choices=["csv", "jsonl"], default=None,
                          help="output dataset format (default: inferred from --out suffix)")

    compare = verbs.add_parser(
        "compare", help="run several algorithms plus the win-rate baseline on one split"
    )
    _add_io_arguments(compare)
    compare.add_argument(
        "--algorithms", default="elo,bradley_terry,glicko,markov",
        help="comma-separated algorithm list (win_rate baseline always included)",
    )
    _add_config_arguments(compare)

    return parser


def _configs_from_args(args) -> AlgorithmConfigs:
    elo_initial = args.initial_rating if args.initial_rating is not None else 1000.0
    glicko_initial = args.initial_rating if args.initial_rating is not None else 1500.0
    return AlgorithmConfigs(
        elo=EloConfig(
            k=args.k,
            initial_rating=elo_initial,
            permutations=args.permutations,
            seed=args.seed,
        ),
        bradley_terry=BtConfig(
            max_iters=args.max_iters,
            tolerance=args.tolerance,
            weighted=args.weighted,
            regularization=args.regularization,
        ),
        glicko=GlickoConfig(
            initial_rating=glicko_initial,
            initial_rd=args.initial_rd,
            min_rd=args.min_rd,
        ),
        markov=MarkovConfig(
            p=args.p,
            power_tol=args.power_tol,
            max_power_iters=args.max_power_iters,
        ),
        markov_smoothing=args.smoothing,
    )


def _meta(args, dataset: Dataset | None = None, **extra) -> dict:
    meta: dict[str, object] = {
        "tool": "pairrank",
        "version": __version__,
        "verb": args.verb,
        "input": str(args.input) if getattr(args, "input", None) else None,
        "seed": args.seed,
    }
    if dataset is not None:
        meta["dataset"] = {
            "competitors": len(dataset.roster),
            "matches": len(dataset.matches),
        }
    meta.update(extra)
    return meta


def _emit_report(doc: dict, args) -> None:
    if args.out:
        write_report(doc, args.out)
        if not args.no_figures:
            render_report_figures(doc, args.out)
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(to_json_text(doc))


def _parse_float_list(text: str, flag: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ValueError(f"{flag} expects comma-separated numbers, got {text!r}") from None
    if not values:
        raise ValueError(f"{flag} must not be empty")
    return values


def _cmd_rank(args) -> int:
    dataset = load_dataset(args.input, args.format)
    configs = _configs_from_args(args)
    algorithm = parse_algorithm(args.algorithm)
    if args.dump_matrix and algorithm is not Algorithm.MARKOV:
        raise ValueError("--dump-matrix applies to the markov algorithm only")
    if algorithm is Algorithm.MARKOV:
        matrix = build_transition(dataset, configs.markov)
        if configs.markov_smoothing > 0:
            matrix = smooth_transition(matrix, configs.markov_smoothing)
        if args.dump_matrix:
            dump_matrix(matrix, args.dump_matrix)
        result = stationary(matrix, configs.markov)
    else:
        result = fit_ranking(dataset, algorithm, configs)
    text = to_json_text(ranking_document(result))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_evaluate(args) -> int:
    dataset = load_dataset(args.input, args.format)
    configs = _configs_from_args(args)
    algorithm = parse_algorithm(args.algorithm)
    train, test = split_dataset(dataset, args.train_fraction, args.seed)
    result = fit_ranking(train, algorithm, configs)
    summary = _transitivity_summary(enumerate_triples(dataset), result)
    report = predict_f1(train, test, result)
    transitivity, f1 = evaluation_sections(algorithm, summary, report)
    doc = document(
        _meta(args, dataset, algorithm=algorithm.value,
              train_fraction=args.train_fraction),
        transitivity=transitivity,
        f1=f1,
    )
    _emit_report(doc, args)
    return 0


def _cmd_sweep(args) -> int:
    dataset = load_dataset(args.input, args.format)
    configs = _configs_from_args(args)
    algorithm = parse_algorithm(args.algorithm)
    parameter = args.parameter or _SWEEP_PARAMETER.get(algorithm)
    if parameter is None:
        raise ValueError(f"algorithm {algorithm.value} has no sweepable parameter")
    values = None
    grid = None
    if args.values is None:
        grid = DEFAULT_GRIDS.get((algorithm, parameter))
        if grid is None:
            raise ValueError(f"no default grid for {algorithm.value}.{parameter}")
    elif ":" in args.values:
        parts = args.values.split(":")
        if len(parts) != 3:
            raise ValueError("--values grid form is 'min:max:count'")
        grid = (float(parts[0]), float(parts[1]), int(parts[2]))
    else:
        values = _parse_float_list(args.values, "--values")
    spec = SweepSpec(
        algorithm=algorithm,
        parameter=parameter,
        values=values,
        grid=grid,
        repeats=args.repeats,
        split_seed=args.seed,
    )
    report = run_sweep(dataset, spec, configs)
    doc = document(
        _meta(args, dataset, algorithm=algorithm.value, parameter=parameter),
        sweep=sweep_section(report),
    )
    _emit_report(doc, args)
    return 0


def _cmd_permute(args) -> int:
    dataset = load_dataset(args.input, args.format)
    k_values = _parse_float_list(args.k_values, "--k-values")
    counts = tuple(int(v) for v in _parse_float_list(args.permutation_counts, "--permutation-counts"))
    study = run_permutation_study(dataset, list(k_values), list(counts), args.seed)
    doc = document(_meta(args, dataset), permutation=permutation_section(study))
    _emit_report(doc, args)
    return 0


def _cmd_simulate(args) -> int:
    if not args.out:
        raise ValueError("simulate requires --out to place the dataset and its sidecar")
    logits = None
    if args.true_logits is not None:
        logits = _parse_float_list(args.true_logits, "--true-logits")
    config = SimConfig(
        n_competitors=args.n_competitors,
        n_matches=args.n_matches,
        true_logits=logits,
        style=args.style,
        skew_alpha=args.skew_alpha,
        tie_rate=args.tie_rate,
        seed=args.seed,
    )
    dataset, truth = generate(config)
    out = Path(args.out)
    save_dataset(dataset, out, args.out_format)
    sidecar = out.parent / (out.stem + ".truth.csv" if out.suffix else out.name + ".truth.csv")
    save_ground_truth(truth, sidecar)
    print(f"wrote {out} and {sidecar}", file=sys.stderr)
    return 0


def _cmd_compare(args) -> int:
    dataset = load_dataset(args.input, args.format)
    configs = _configs_from_args(args)
    names = [n.strip() for n in args.algorithms.split(",") if n.strip()]
    comparison = compare_algorithms(dataset, names, args.seed, configs)
    transitivity, f1, correlations = comparison_sections(comparison)
    doc = document(
        _meta(
            args,
            dataset,
            algorithms=[a.value for a in comparison.algorithms],
            train_fraction=comparison.train_fraction,
            failures=comparison.failures,
        ),
        transitivity=transitivity,
        f1=f1,
        correlations=correlations,
    )
    _emit_report(doc, args)
    return 0


_COMMANDS = {
    "rank": _cmd_rank,
    "evaluate": _cmd_evaluate,
    "sweep": _cmd_sweep,
    "permute": _cmd_permute,
    "simulate": _cmd_simulate,
    "compare": _cmd_compare,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.verb](args)
    except (DatasetParseError, DatasetValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConvergenceError, DisconnectedChainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
