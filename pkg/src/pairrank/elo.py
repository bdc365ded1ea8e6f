"""Sequential Elo ratings with a configurable k-factor and permutation averaging."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    _SEED_MASK,
    Algorithm,
    Dataset,
    Rating,
    RankingResult,
    make_result,
)

_VALID_SCORES = (0.0, 0.5, 1.0)


@dataclass(frozen=True)
class EloConfig:
    """Elo hyperparameters.

    ``permutations == 0`` runs a single pass in the given match order;
    ``permutations >= 1`` averages ratings over that many independent passes,
    each on a uniformly shuffled match order derived from ``seed``.
    """

    k: float = 4.0
    initial_rating: float = 1000.0
    permutations: int = 0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k <= 0:
            raise ValueError(f"k-factor must be positive, got {self.k}")
        if self.permutations < 0:
            raise ValueError(f"permutations must be non-negative, got {self.permutations}")


def elo_expected(theta_i: float, theta_j: float) -> float:
    """Win probability 1 / (1 + 10^((theta_j - theta_i) / 400))."""
    return 1.0 / (1.0 + 10.0 ** ((theta_j - theta_i) / 400.0))


def elo_update(theta_i: float, theta_j: float, s_ij: float, k: float) -> float:
    """One rating step: theta_i + k * (s_ij - expected score against j)."""
    if s_ij not in _VALID_SCORES:
        raise ValueError(f"score must be one of {_VALID_SCORES}, got {s_ij}")
    if k <= 0:
        raise ValueError(f"k-factor must be positive, got {k}")
    return theta_i + k * (s_ij - elo_expected(theta_i, theta_j))


def _run_pass(
    order,
    firsts: list[int],
    seconds: list[int],
    scores: list[float],
    size: int,
    k: float,
    initial: float,
) -> list[float]:
    # Each match transfers k*(S - p) between exactly two competitors, so the
    # rating sum is conserved to floating-point roundoff.
    theta = [initial] * size
    for t in order:
        i = firsts[t]
        j = seconds[t]
        ti = theta[i]
        tj = theta[j]
        delta = k * (scores[t] - 1.0 / (1.0 + 10.0 ** ((tj - ti) / 400.0)))
        theta[i] = ti + delta
        theta[j] = tj - delta
    return theta


def elo_rank(dataset: Dataset, config: EloConfig = EloConfig()) -> RankingResult:
    """Run Elo over the dataset and rank by final (or permutation-mean) rating.

    With ``permutations >= 1`` the result carries the per-competitor rating
    standard deviation across passes under ``metadata["theta_std"]``. Passes
    are reduced in permutation index order, so results are reproducible.
    """
    roster = dataset.roster
    index = {c: n for n, c in enumerate(roster)}
    size = len(roster)
    firsts = [index[m.first] for m in dataset.matches]
    seconds = [index[m.second] for m in dataset.matches]
    scores = [m.outcome.score for m in dataset.matches]
    n_matches = len(dataset.matches)

    metadata: dict[str, object] = {
        "unrated": sorted(c for c in roster if dataset.matches_played(c) == 0)
    }

    if config.permutations == 0:
        final = _run_pass(
            range(n_matches), firsts, seconds, scores, size, config.k, config.initial_rating
        )
    else:
        seed_root = np.random.SeedSequence(config.seed & _SEED_MASK)
        passes = np.empty((config.permutations, size))
        for number, child in enumerate(seed_root.spawn(config.permutations)):
            order = np.random.default_rng(child).permutation(n_matches).tolist()
            passes[number] = _run_pass(
                order, firsts, seconds, scores, size, config.k, config.initial_rating
            )
        final = passes.mean(axis=0).tolist()
        stds = passes.std(axis=0)
        metadata["theta_std"] = {c: float(stds[index[c]]) for c in roster}

    ratings = {c: Rating(final[index[c]]) for c in roster}
    return make_result(
        Algorithm.ELO,
        ratings,
        {
            "k": config.k,
            "initial_rating": config.initial_rating,
            "permutations": config.permutations,
        },
        seed=config.seed,
        metadata=metadata,
    )
