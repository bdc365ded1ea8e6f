"""Synthetic tournament generation with known ground-truth strengths.

Outcomes are drawn from the logistic (Bradley-Terry) model on true logits.
Two matchmaking styles mirror real evaluation regimes: ``controlled`` samples
pairs uniformly, ``arena`` weights each pair by the product of Zipf
popularity masses so a few competitors soak up most matches.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import _SEED_MASK, CompetitorId, Dataset, MatchRecord, Outcome

STYLES = ("controlled", "arena")


@dataclass(frozen=True)
class SimConfig:
    """Tournament shape, ground-truth strengths, and noise controls."""

    n_competitors: int
    n_matches: int
    true_logits: tuple[float, ...] | None = None
    style: str = "controlled"
    skew_alpha: float = 1.2
    tie_rate: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_competitors < 2:
            raise ValueError(f"need at least 2 competitors, got {self.n_competitors}")
        if self.n_matches < 1:
            raise ValueError(f"n_matches must be positive, got {self.n_matches}")
        if self.style not in STYLES:
            raise ValueError(f"style must be one of {STYLES}, got {self.style!r}")
        if self.skew_alpha <= 0:
            raise ValueError(f"skew_alpha must be positive, got {self.skew_alpha}")
        if not 0.0 <= self.tie_rate < 1.0:
            raise ValueError(f"tie_rate must lie in [0, 1), got {self.tie_rate}")
        if self.true_logits is not None and len(self.true_logits) != self.n_competitors:
            raise ValueError(
                f"true_logits must have {self.n_competitors} entries, "
                f"got {len(self.true_logits)}"
            )


def competitor_ids(n: int) -> tuple[CompetitorId, ...]:
    """Zero-padded ids c0..c9, c00..c19, ... so lexicographic order is index order."""
    width = len(str(n - 1))
    return tuple(f"c{i:0{width}d}" for i in range(n))


def generate(config: SimConfig) -> tuple[Dataset, dict[CompetitorId, float]]:
    """Generate a match stream and return it with the ground-truth logits.

    True logits default to an even grid from +2 down to -2, so the first
    competitor is the strongest. Each match samples a pair (per style), a
    uniformly random presentation order, and an outcome from the logistic of
    the logit difference; with probability ``tie_rate`` the outcome is
    overridden to a tie. Fully deterministic given the seed.
    """
    n = config.n_competitors
    ids = competitor_ids(n)
    if config.true_logits is not None:
        logits = np.asarray(config.true_logits, dtype=float)
    else:
        logits = np.linspace(2.0, -2.0, n)

    rng = np.random.default_rng(config.seed & _SEED_MASK)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if config.style == "arena":
        mass = (np.arange(n) + 1.0) ** (-config.skew_alpha)
        weights = np.array([mass[i] * mass[j] for i, j in pairs])
        weights /= weights.sum()
    else:
        weights = None

    picks = rng.choice(len(pairs), size=config.n_matches, p=weights)
    swaps = rng.random(config.n_matches) < 0.5
    outcome_draws = rng.random(config.n_matches)
    tie_draws = rng.random(config.n_matches) < config.tie_rate

    records = []
    for t in range(config.n_matches):
        i, j = pairs[picks[t]]
        if swaps[t]:
            i, j = j, i
        if tie_draws[t]:
            outcome = Outcome.TIE
        else:
            p_first = 1.0 / (1.0 + np.exp(-(logits[i] - logits[j])))
            outcome = Outcome.FIRST_WINS if outcome_draws[t] < p_first else Outcome.SECOND_WINS
        records.append(MatchRecord(ids[i], ids[j], outcome, t))

    truth = {ids[i]: float(logits[i]) for i in range(n)}
    return Dataset.from_matches(records, roster=ids), truth


def save_ground_truth(truth: dict[CompetitorId, float], path: str | Path) -> None:
    """Write the sidecar ground-truth file: CSV with header ``competitor,logit``."""
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["competitor", "logit"])
        for competitor in sorted(truth):
            writer.writerow([competitor, f"{truth[competitor]:.17g}"])
