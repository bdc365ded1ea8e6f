"""pairrank: rate and rank competitors from head-to-head comparisons.

Four rating systems (Elo, Bradley-Terry, Glicko, Markov chain) plus a
win-rate baseline, an evaluation harness (transitivity preservation,
prediction-accuracy F1, rank correlations, hyperparameter sweeps, permutation
stability), and a synthetic tournament generator, all driven by one CLI.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .bradley_terry import BtConfig, bt_fit, bt_gradient, bt_log_likelihood, bt_probability
from .core import (
    Algorithm,
    CompetitorId,
    ConvergenceError,
    Dataset,
    DatasetParseError,
    DatasetValidationError,
    MatchRecord,
    Outcome,
    PairTally,
    RankingResult,
    Rating,
    load_dataset,
    make_result,
    ranked_order,
    save_dataset,
    split_dataset,
    win_rate_ranking,
)
from .elo import EloConfig, elo_expected, elo_rank, elo_update
from .experiments import (
    AlgorithmComparison,
    AlgorithmConfigs,
    PermutationStudy,
    SweepReport,
    SweepSpec,
    compare_algorithms,
    fit_ranking,
    parse_algorithm,
    run_permutation_study,
    run_sweep,
    to_json_text,
    write_report,
)
from .glicko import GlickoConfig, glicko_expected, glicko_g, glicko_rank, glicko_update
from .markov import (
    DisconnectedChainError,
    MarkovConfig,
    TransitionMatrix,
    build_transition,
    dump_matrix,
    markov_rank,
    smooth_transition,
    stationary,
)
from .metrics import (
    F1Report,
    PairScores,
    Triple,
    enumerate_triples,
    predict_f1,
    probability_from_result,
    spearman,
    transitivity_score,
)
from .simulator import SimConfig, competitor_ids, generate, save_ground_truth

__all__ = [
    "Algorithm",
    "AlgorithmComparison",
    "AlgorithmConfigs",
    "BtConfig",
    "CompetitorId",
    "ConvergenceError",
    "Dataset",
    "DatasetParseError",
    "DatasetValidationError",
    "DisconnectedChainError",
    "EloConfig",
    "F1Report",
    "GlickoConfig",
    "MarkovConfig",
    "MatchRecord",
    "Outcome",
    "PairScores",
    "PairTally",
    "PermutationStudy",
    "RankingResult",
    "Rating",
    "SimConfig",
    "SweepReport",
    "SweepSpec",
    "TransitionMatrix",
    "Triple",
    "__version__",
    "bt_fit",
    "bt_gradient",
    "bt_log_likelihood",
    "bt_probability",
    "build_transition",
    "compare_algorithms",
    "competitor_ids",
    "dump_matrix",
    "elo_expected",
    "elo_rank",
    "elo_update",
    "enumerate_triples",
    "fit_ranking",
    "generate",
    "glicko_expected",
    "glicko_g",
    "glicko_rank",
    "glicko_update",
    "load_dataset",
    "make_result",
    "markov_rank",
    "parse_algorithm",
    "predict_f1",
    "probability_from_result",
    "ranked_order",
    "run_permutation_study",
    "run_sweep",
    "save_dataset",
    "save_ground_truth",
    "smooth_transition",
    "spearman",
    "split_dataset",
    "stationary",
    "to_json_text",
    "transitivity_score",
    "win_rate_ranking",
    "write_report",
]
