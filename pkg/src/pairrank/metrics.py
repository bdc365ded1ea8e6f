"""Evaluation criteria for ranking results.

Three families of checks live here: transitivity preservation over empirical
majority triples, the expected-vs-actual-wins F1 prediction protocol, and
Spearman rank correlation between rankings. All functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from scipy import stats

from .core import CompetitorId, Dataset, RankingResult
from .core import Algorithm
from .elo import elo_expected
from .glicko import glicko_expected


class Triple(NamedTuple):
    """An ordered trio where i majority-beats j and j majority-beats k."""

    i: CompetitorId
    j: CompetitorId
    k: CompetitorId


class PairScores(NamedTuple):
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class F1Report:
    """Prediction-accuracy report.

    ``per_competitor`` averages each competitor's directed pair scores;
    ``overall_f1`` is the mean F1 over all directed pairs scored.
    """

    per_competitor: dict[CompetitorId, PairScores]
    overall_f1: float
    metadata: dict[str, object] = field(default_factory=dict)


def _majority_edges(dataset: Dataset) -> dict[CompetitorId, list[CompetitorId]]:
    # Strict majority on decisive games only: ties count as neither win, and
    # pairs that never played cannot form an edge.
    edges: dict[CompetitorId, list[CompetitorId]] = {}
    for (a, b), tally in sorted(dataset.tallies.items()):
        if tally.wins > tally.losses:
            edges.setdefault(a, []).append(b)
    return edges


def enumerate_triples(dataset: Dataset) -> list[Triple]:
    """All ordered distinct (i, j, k) with i majority-beating j and j majority-beating k."""
    edges = _majority_edges(dataset)
    triples = []
    for i in sorted(edges):
        for j in edges[i]:
            for k in edges.get(j, ()):
                if k != i:
                    triples.append(Triple(i, j, k))
    return triples


def transitivity_score(dataset: Dataset, result: RankingResult) -> float | None:
    """Fraction of majority triples the ranking keeps in order.

    A triple (i, j, k) is preserved when the final ranking places i above j
    above k. Returns ``None`` (undefined, distinct from 0.0) when the dataset
    has no triples.
    """
    missing = [c for c in dataset.roster if c not in result.ratings]
    if missing:
        raise ValueError(f"ranking does not cover roster competitors: {missing}")
    triples = enumerate_triples(dataset)
    if not triples:
        return None
    position = {c: n for n, c in enumerate(result.order)}
    preserved = sum(
        1 for i, j, k in triples if position[i] < position[j] < position[k]
    )
    return preserved / len(triples)


def probability_from_result(
    result: RankingResult, i: CompetitorId, j: CompetitorId
) -> float:
    """Win probability of ``i`` over ``j`` under the result's own model.

    Elo uses its base-10 curve on rating differences, Glicko the same curve
    damped by the combined deviation g(sqrt(sigma_i^2 + sigma_j^2)) so the
    probability is symmetric in the pair, Bradley-Terry the logistic of the
    logit difference, and Markov/win-rate the strength ratio
    theta_i / (theta_i + theta_j) (0/0 falling back to 0.5). Complementarity
    p(i, j) + p(j, i) = 1 holds exactly for every algorithm.
    """
    if i not in result.ratings:
        raise ValueError(f"unknown competitor {i!r}")
    if j not in result.ratings:
        raise ValueError(f"unknown competitor {j!r}")
    if j < i:
        return 1.0 - probability_from_result(result, j, i)

    rating_i = result.ratings[i]
    rating_j = result.ratings[j]
    algorithm = result.algorithm
    if algorithm is Algorithm.ELO:
        return elo_expected(rating_i.theta, rating_j.theta)
    if algorithm is Algorithm.GLICKO:
        sigma_i = rating_i.sigma or 0.0
        sigma_j = rating_j.sigma or 0.0
        combined = math.sqrt(sigma_i * sigma_i + sigma_j * sigma_j)
        return glicko_expected(rating_i.theta, rating_j.theta, combined)
    if algorithm is Algorithm.BRADLEY_TERRY:
        diff = rating_i.theta - rating_j.theta
        if diff >= 0:
            return 1.0 / (1.0 + math.exp(-diff))
        exp_diff = math.exp(diff)
        return exp_diff / (1.0 + exp_diff)
    # Markov stationary mass and win rate share the strength-ratio rule.
    total = rating_i.theta + rating_j.theta
    if total == 0:
        return 0.5
    return rating_i.theta / total


def _directed_scores(expected: int, actual: int) -> PairScores:
    # Overlap of the expected and actual win counts; E = A = 0 is vacuously
    # correct (1.0) and a zero denominator on one side only scores 0.0.
    if expected == 0 and actual == 0:
        return PairScores(1.0, 1.0, 1.0)
    overlap = min(expected, actual)
    precision = overlap / expected if expected > 0 else 0.0
    recall = overlap / actual if actual > 0 else 0.0
    if precision + recall == 0:
        return PairScores(precision, recall, 0.0)
    return PairScores(precision, recall, 2 * precision * recall / (precision + recall))


def predict_f1(train: Dataset, test: Dataset, result: RankingResult) -> F1Report:
    """Score how well a fitted ranking predicts the test matches.

    For each direction (i, j) of every unordered pair present in the test
    set, the expected wins are E = floor(M * p_ij) over the pair's M test
    matches, the actual wins A = floor(wins + 0.5 * ties); precision and
    recall come from the count overlap min(E, A) and the pair scores their
    harmonic mean. Per-competitor scores average each competitor's directed
    pairs; the overall F1 averages all directed pairs. Pairs involving
    competitors outside the fitted roster are excluded and counted in the
    report metadata.
    """
    if len(test.matches) == 0:
        raise ValueError("test dataset must be non-empty")

    directed: list[dict[str, object]] = []
    excluded = 0
    for a, b in test.unordered_pairs():
        if a not in result.ratings or b not in result.ratings:
            excluded += 1
            continue
        tally = test.tally(a, b)
        total = tally.wins + tally.losses + tally.ties
        for i, j in ((a, b), (b, a)):
            p = probability_from_result(result, i, j)
            expected = math.floor(total * p)
            actual = math.floor(test.tie_adjusted_wins(i, j))
            scores = _directed_scores(expected, actual)
            directed.append(
                {
                    "first": i,
                    "second": j,
                    "matches": total,
                    "probability": p,
                    "expected_wins": expected,
                    "actual_wins": actual,
                    "precision": scores.precision,
                    "recall": scores.recall,
                    "f1": scores.f1,
                }
            )

    if not directed:
        raise ValueError("no test pair overlaps the fitted roster")

    by_competitor: dict[CompetitorId, list[PairScores]] = {}
    for entry in directed:
        by_competitor.setdefault(str(entry["first"]), []).append(
            PairScores(entry["precision"], entry["recall"], entry["f1"])  # type: ignore[arg-type]
        )
    per_competitor = {
        c: PairScores(
            sum(s.precision for s in scores) / len(scores),
            sum(s.recall for s in scores) / len(scores),
            sum(s.f1 for s in scores) / len(scores),
        )
        for c, scores in sorted(by_competitor.items())
    }
    overall = sum(float(entry["f1"]) for entry in directed) / len(directed)
    return F1Report(
        per_competitor=per_competitor,
        overall_f1=overall,
        metadata={
            "directed_pairs": len(directed),
            "excluded_pairs": excluded,
            "train_matches": len(train.matches),
            "test_matches": len(test.matches),
            "directed": directed,
        },
    )


def spearman(first: RankingResult, second: RankingResult) -> float:
    """Spearman rank correlation between two rankings of the same roster.

    Ranks are derived from the strength scores with tied-rank averaging
    before correlating; the value is therefore invariant under any strictly
    monotone transform of the scores. Degenerate inputs (fewer than two
    competitors, or constant scores) return NaN.
    """
    if set(first.ratings) != set(second.ratings):
        raise ValueError("rankings cover different rosters")
    roster = sorted(first.ratings)
    if len(roster) < 2:
        return math.nan
    x = [first.ratings[c].theta for c in roster]
    y = [second.ratings[c].theta for c in roster]
    return float(stats.spearmanr(x, y).statistic)
