"""Glicko ratings: Elo extended with a per-competitor rating deviation.

Updates follow the classic single-period equations with q = ln(10)/400. With
deviation 0 the expected-score formula degenerates to plain Elo exactly.
Ratings are updated after every match (one-element opponent set) and the
deviation only ever shrinks; there is no between-period inflation because the
rated subjects are static.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

from .core import Algorithm, Dataset, Rating, RankingResult, make_result

#: Glicko scale constant q = ln(10) / 400.
Q = math.log(10.0) / 400.0

_G_COEFF = 3.0 * Q * Q / math.pi**2
_VALID_SCORES = (0.0, 0.5, 1.0)


@dataclass(frozen=True)
class GlickoConfig:
    """Initial rating/deviation and the deviation floor."""

    initial_rating: float = 1500.0
    initial_rd: float = 350.0
    min_rd: float = 30.0

    def __post_init__(self) -> None:
        if self.initial_rd <= 0:
            raise ValueError(f"initial_rd must be positive, got {self.initial_rd}")
        if self.min_rd < 0:
            raise ValueError(f"min_rd must be non-negative, got {self.min_rd}")
        if self.min_rd > self.initial_rd:
            raise ValueError(
                f"min_rd must not exceed initial_rd ({self.min_rd} > {self.initial_rd})"
            )


def glicko_g(sigma: float) -> float:
    """Deviation damping g(sigma) = 1 / sqrt(1 + 3 q^2 sigma^2 / pi^2), in (0, 1]."""
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    return 1.0 / math.sqrt(1.0 + _G_COEFF * sigma * sigma)


def glicko_expected(theta_i: float, theta_j: float, sigma_j: float) -> float:
    """Expected score 1 / (1 + 10^(-g(sigma_j) (theta_i - theta_j) / 400)).

    With ``sigma_j == 0`` this is exactly the Elo expected score.
    """
    return 1.0 / (1.0 + 10.0 ** (-glicko_g(sigma_j) * (theta_i - theta_j) / 400.0))


def glicko_update(
    rating: Rating,
    opponents: Sequence[tuple[Rating, float]],
    min_rd: float = 0.0,
) -> Rating:
    """Update (theta, sigma) from a set of results against rated opponents.

    The new deviation is sqrt(1 / (1/sigma^2 + 1/d^2)), strictly below the old
    one before the ``min_rd`` clamp; information only ever shrinks it.

    Args:
        rating: Current rating; must carry a deviation.
        opponents: Non-empty ``(opponent_rating, score)`` pairs with scores
            in {0, 0.5, 1}.
        min_rd: Floor applied to the updated deviation.
    """
    if not opponents:
        raise ValueError("opponents must be non-empty")
    sigma = rating.sigma
    if sigma is None:
        raise ValueError("rating must carry a deviation (sigma)")
    if sigma == 0.0:
        # Absolute certainty: nothing can move the rating.
        return rating

    inv_d2 = 0.0
    innovation = 0.0
    for opponent, score in opponents:
        if score not in _VALID_SCORES:
            raise ValueError(f"score must be one of {_VALID_SCORES}, got {score}")
        sigma_j = opponent.sigma if opponent.sigma is not None else 0.0
        g_j = glicko_g(sigma_j)
        p = 1.0 / (1.0 + 10.0 ** (-g_j * (rating.theta - opponent.theta) / 400.0))
        inv_d2 += g_j * g_j * p * (1.0 - p)
        innovation += g_j * (score - p)
    inv_d2 *= Q * Q

    precision = 1.0 / (sigma * sigma) + inv_d2
    theta = rating.theta + (Q / precision) * innovation
    new_sigma = max(min_rd, math.sqrt(1.0 / precision))
    return Rating(theta, new_sigma)


def glicko_rank(dataset: Dataset, config: GlickoConfig = GlickoConfig()) -> RankingResult:
    """Sequential pass in match order; both participants update from pre-match state."""
    ratings = {c: Rating(config.initial_rating, config.initial_rd) for c in dataset.roster}
    min_rd = config.min_rd
    for match in dataset.matches:
        first = ratings[match.first]
        second = ratings[match.second]
        score = match.outcome.score
        ratings[match.first] = glicko_update(first, ((second, score),), min_rd)
        ratings[match.second] = glicko_update(second, ((first, 1.0 - score),), min_rd)

    unrated = sorted(c for c in dataset.roster if dataset.matches_played(c) == 0)
    return make_result(
        Algorithm.GLICKO,
        ratings,
        {
            "initial_rating": config.initial_rating,
            "initial_rd": config.initial_rd,
            "min_rd": config.min_rd,
        },
        metadata={"unrated": unrated},
    )
