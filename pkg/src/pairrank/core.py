"""Domain types, dataset ingestion and tallying, splitting, and the win-rate baseline.

Everything downstream (the rating algorithms, the metrics, the experiment
harness) consumes the immutable :class:`Dataset` and produces a
:class:`RankingResult`. Both are plain frozen dataclasses that are safe to
share across threads; all operations in this module are pure given their
inputs plus an explicit seed.
"""

from __future__ import annotations

import csv
import json
from collections.abc import Iterable
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import NamedTuple

import numpy as np

CompetitorId = str

#: Seeds are folded into a non-negative 64-bit entropy word before reaching numpy.
_SEED_MASK = (1 << 64) - 1


class DatasetParseError(ValueError):
    """A dataset file could not be parsed (malformed row, unknown outcome token)."""


class DatasetValidationError(ValueError):
    """A dataset violates a structural invariant (self-match, duplicate sequence, ...)."""


class ConvergenceError(RuntimeError):
    """An iterative solver exhausted its iteration budget.

    Attributes:
        result: Best iterate reached before giving up, when available.
        gradient_norm: Max-abs gradient component at the best iterate.
        residual: Iteration residual at the point of failure.
    """

    def __init__(
        self,
        message: str,
        *,
        result: "RankingResult | None" = None,
        gradient_norm: float | None = None,
        residual: float | None = None,
    ) -> None:
        super().__init__(message)
        self.result = result
        self.gradient_norm = gradient_norm
        self.residual = residual


class Outcome(Enum):
    """Result of one match, seen from the first competitor's side."""

    FIRST_WINS = "first"
    SECOND_WINS = "second"
    TIE = "tie"

    @property
    def score(self) -> float:
        """Match score earned by the first competitor: 1, 0, or 0.5."""
        return _OUTCOME_SCORES[self]


_OUTCOME_SCORES = {Outcome.FIRST_WINS: 1.0, Outcome.SECOND_WINS: 0.0, Outcome.TIE: 0.5}


class Algorithm(Enum):
    """Ranking systems understood by the toolkit."""

    ELO = "elo"
    BRADLEY_TERRY = "bradley_terry"
    GLICKO = "glicko"
    MARKOV = "markov"
    WIN_RATE = "win_rate"


class PairTally(NamedTuple):
    """Head-to-head record for an ordered pair: the first competitor's counts."""

    wins: int
    losses: int
    ties: int


@dataclass(frozen=True)
class MatchRecord:
    """One head-to-head outcome. ``sequence`` is the position in the match stream."""

    first: CompetitorId
    second: CompetitorId
    outcome: Outcome
    sequence: int

    def __post_init__(self) -> None:
        if not self.first or not self.second:
            raise DatasetValidationError("competitor ids must be non-empty")
        if self.first == self.second:
            raise DatasetValidationError(
                f"self-match is not allowed: {self.first!r} plays itself"
            )
        if self.sequence < 0:
            raise DatasetValidationError("sequence must be non-negative")


@dataclass(frozen=True)
class Rating:
    """A competitor's strength; ``sigma`` is the rating deviation (Glicko only)."""

    theta: float
    sigma: float | None = None


@dataclass(frozen=True)
class Dataset:
    """Immutable, ordered match collection with precomputed per-pair tallies.

    Tallies are stored for both orderings of every pair that played, so the
    symmetry ``wins(i, j) == losses(j, i)`` holds by construction.
    """

    roster: tuple[CompetitorId, ...]
    matches: tuple[MatchRecord, ...]
    tallies: dict[tuple[CompetitorId, CompetitorId], PairTally]

    @classmethod
    def from_matches(
        cls,
        matches: Iterable[MatchRecord],
        roster: Iterable[CompetitorId] = (),
    ) -> "Dataset":
        """Build a dataset, computing tallies and validating sequence uniqueness.

        Args:
            matches: Match records in stream order.
            roster: Extra competitors to keep in the roster even when they
                appear in no match (e.g. after a train/test split).

        Returns:
            A validated dataset whose roster is sorted lexicographically.
        """
        records = tuple(matches)
        seen = set()
        for record in records:
            if record.sequence in seen:
                raise DatasetValidationError(
                    f"duplicate sequence number {record.sequence}"
                )
            seen.add(record.sequence)

        competitors = set(roster)
        for record in records:
            competitors.add(record.first)
            competitors.add(record.second)
        if any(not c for c in competitors):
            raise DatasetValidationError("competitor ids must be non-empty")

        counts: dict[tuple[CompetitorId, CompetitorId], list[int]] = {}
        for record in records:
            forward = counts.setdefault((record.first, record.second), [0, 0, 0])
            backward = counts.setdefault((record.second, record.first), [0, 0, 0])
            if record.outcome is Outcome.FIRST_WINS:
                forward[0] += 1
                backward[1] += 1
            elif record.outcome is Outcome.SECOND_WINS:
                forward[1] += 1
                backward[0] += 1
            else:
                forward[2] += 1
                backward[2] += 1

        tallies = {pair: PairTally(*c) for pair, c in sorted(counts.items())}
        return cls(roster=tuple(sorted(competitors)), matches=records, tallies=tallies)

    def __len__(self) -> int:
        return len(self.matches)

    def tally(self, i: CompetitorId, j: CompetitorId) -> PairTally:
        """Tally of ``i`` against ``j``; zeros when the pair never played."""
        return self.tallies.get((i, j), PairTally(0, 0, 0))

    def tie_adjusted_wins(self, i: CompetitorId, j: CompetitorId) -> float:
        """Wins of ``i`` over ``j`` with ties credited half to each side."""
        wins, _, ties = self.tally(i, j)
        return wins + 0.5 * ties

    def wins(self, i: CompetitorId) -> int:
        return sum(t.wins for (a, _), t in self.tallies.items() if a == i)

    def losses(self, i: CompetitorId) -> int:
        return sum(t.losses for (a, _), t in self.tallies.items() if a == i)

    def ties(self, i: CompetitorId) -> int:
        return sum(t.ties for (a, _), t in self.tallies.items() if a == i)

    def matches_played(self, i: CompetitorId) -> int:
        return self.wins(i) + self.losses(i) + self.ties(i)

    def unordered_pairs(self) -> list[tuple[CompetitorId, CompetitorId]]:
        """Sorted unordered pairs with at least one match between them."""
        return sorted({(a, b) for (a, b) in self.tallies if a < b})


@dataclass(frozen=True)
class RankingResult:
    """Output of one ranking algorithm.

    ``order`` is a total order over the roster: descending ``theta``, ties
    broken by ascending competitor id so results are always deterministic.
    """

    algorithm: Algorithm
    ratings: dict[CompetitorId, Rating]
    order: tuple[CompetitorId, ...]
    hyperparameters: dict[str, object]
    seed: int | None = None
    metadata: dict[str, object] = field(default_factory=dict)


def ranked_order(ratings: dict[CompetitorId, Rating]) -> tuple[CompetitorId, ...]:
    """Total order: descending theta, ties broken by ascending competitor id."""
    return tuple(sorted(ratings, key=lambda c: (-ratings[c].theta, c)))


def make_result(
    algorithm: Algorithm,
    ratings: dict[CompetitorId, Rating],
    hyperparameters: dict[str, object],
    seed: int | None = None,
    metadata: dict[str, object] | None = None,
) -> RankingResult:
    """Assemble a :class:`RankingResult` with deterministic ordering."""
    return RankingResult(
        algorithm=algorithm,
        ratings=dict(sorted(ratings.items())),
        order=ranked_order(ratings),
        hyperparameters=dict(hyperparameters),
        seed=seed,
        metadata=dict(metadata or {}),
    )


_CSV_HEADER = ["first", "second", "outcome"]
_OUTCOME_TOKENS = {o.value: o for o in Outcome}


def _parse_row(
    path: Path, lineno: int, first: str, second: str, token: str
) -> tuple[str, str, Outcome]:
    outcome = _OUTCOME_TOKENS.get(token)
    if outcome is None:
        raise DatasetParseError(
            f"{path}:{lineno}: unknown outcome token {token!r} "
            f"(expected one of {sorted(_OUTCOME_TOKENS)})"
        )
    if first == second:
        raise DatasetValidationError(
            f"{path}:{lineno}: self-match is not allowed: {first!r} plays itself"
        )
    if not first or not second:
        raise DatasetParseError(f"{path}:{lineno}: competitor ids must be non-empty")
    return first, second, outcome


def _load_csv(path: Path) -> list[tuple[str, str, Outcome]]:
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise DatasetParseError(
                f"{path}: empty file, expected header 'first,second,outcome'"
            )
        if [h.strip() for h in header] != _CSV_HEADER:
            raise DatasetParseError(
                f"{path}: bad header {header!r}, expected 'first,second,outcome'"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise DatasetParseError(
                    f"{path}:{lineno}: expected 3 fields, got {len(row)}"
                )
            rows.append(_parse_row(path, lineno, *row))
        return rows


def _load_jsonl(path: Path) -> list[tuple[str, str, Outcome]]:
    rows = []
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetParseError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            if not isinstance(obj, dict):
                raise DatasetParseError(f"{path}:{lineno}: expected a JSON object")
            try:
                first, second, token = obj["first"], obj["second"], obj["outcome"]
            except KeyError as exc:
                raise DatasetParseError(
                    f"{path}:{lineno}: missing field {exc.args[0]!r}"
                ) from exc
            if not all(isinstance(v, str) for v in (first, second, token)):
                raise DatasetParseError(
                    f"{path}:{lineno}: 'first', 'second', 'outcome' must be strings"
                )
            rows.append(_parse_row(path, lineno, first, second, token))
    return rows


def _infer_format(path: Path, format: str | None) -> str:
    if format is not None:
        if format not in ("csv", "jsonl"):
            raise DatasetParseError(f"unknown dataset format {format!r}")
        return format
    suffix = path.suffix.lower()
    if suffix == ".jsonl":
        return "jsonl"
    if suffix == ".csv":
        return "csv"
    raise DatasetParseError(
        f"{path}: cannot infer format from suffix {suffix!r}; pass format explicitly"
    )


def load_dataset(path: str | Path, format: str | None = None) -> Dataset:
    """Load a dataset from a CSV or JSONL match file.

    The CSV format carries a ``first,second,outcome`` header with outcome
    tokens ``first``/``second``/``tie``; JSONL carries one object per line
    with the same string fields. Match order is preserved as given.

    Args:
        path: File to read (UTF-8; LF or CRLF line endings).
        format: ``"csv"`` or ``"jsonl"``; inferred from the suffix when omitted.

    Raises:
        DatasetParseError: Malformed row or unknown outcome token.
        DatasetValidationError: A row pits a competitor against itself.
    """
    path = Path(path)
    fmt = _infer_format(path, format)
    rows = _load_csv(path) if fmt == "csv" else _load_jsonl(path)
    records = [
        MatchRecord(first, second, outcome, sequence)
        for sequence, (first, second, outcome) in enumerate(rows)
    ]
    return Dataset.from_matches(records)


def save_dataset(dataset: Dataset, path: str | Path, format: str | None = None) -> None:
    """Write a dataset back out in the CSV or JSONL match format."""
    path = Path(path)
    fmt = _infer_format(path, format)
    if fmt == "csv":
        with path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(_CSV_HEADER)
            for record in dataset.matches:
                writer.writerow([record.first, record.second, record.outcome.value])
    else:
        with path.open("w", encoding="utf-8") as handle:
            for record in dataset.matches:
                handle.write(
                    json.dumps(
                        {
                            "first": record.first,
                            "second": record.second,
                            "outcome": record.outcome.value,
                        }
                    )
                    + "\n"
                )


def split_dataset(
    dataset: Dataset, train_fraction: float, seed: int
) -> tuple[Dataset, Dataset]:
    """Uniformly random match-level partition into train and test halves.

    The train half holds ``round(train_fraction * n)`` matches. Both halves
    retain the full roster, so competitors that land entirely in one half
    stay visible to every algorithm. Deterministic given ``seed``.

    Args:
        dataset: Dataset with at least two matches.
        train_fraction: Fraction of matches for the train half, in (0, 1).
        seed: Seed for the partition.

    Returns:
        ``(train, test)`` datasets; disjoint, union is the original matches.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    n = len(dataset.matches)
    if n < 2:
        raise DatasetValidationError("need at least 2 matches to split")
    rng = np.random.default_rng(seed & _SEED_MASK)
    permutation = rng.permutation(n)
    n_train = int(round(train_fraction * n))
    train_idx = np.sort(permutation[:n_train])
    test_idx = np.sort(permutation[n_train:])
    train = Dataset.from_matches(
        (dataset.matches[i] for i in train_idx), roster=dataset.roster
    )
    test = Dataset.from_matches(
        (dataset.matches[i] for i in test_idx), roster=dataset.roster
    )
    return train, test


def win_rate_ranking(dataset: Dataset) -> RankingResult:
    """Rank by raw win rate: (wins + 0.5 * ties) / matches played.

    Competitors with zero matches score 0 and are flagged as unrated in the
    result metadata rather than raising.
    """
    ratings: dict[CompetitorId, Rating] = {}
    unrated = []
    for competitor in dataset.roster:
        played = dataset.matches_played(competitor)
        if played == 0:
            ratings[competitor] = Rating(0.0)
            unrated.append(competitor)
        else:
            score = dataset.wins(competitor) + 0.5 * dataset.ties(competitor)
            ratings[competitor] = Rating(score / played)
    return make_result(
        Algorithm.WIN_RATE, ratings, {}, metadata={"unrated": sorted(unrated)}
    )
