"""Experiment orchestration: sweeps, permutation studies, algorithm comparison.

Every experiment shares one deterministic 75/25 train/test split per run, so
differences between points or algorithms reflect the thing being varied, not
split noise. Reports serialize to a single JSON document with fixed sections
(``meta``, ``transitivity``, ``f1``, ``correlations``, ``sweep``,
``permutation``), floats rendered with six decimal places, plus one flat CSV
per table for plotting. Output is byte-reproducible given the same inputs
and seeds.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .bradley_terry import BtConfig, bt_fit
from .core import (
    _SEED_MASK,
    Algorithm,
    CompetitorId,
    ConvergenceError,
    Dataset,
    RankingResult,
    split_dataset,
    win_rate_ranking,
)
from .elo import EloConfig, elo_rank
from .glicko import GlickoConfig, glicko_rank
from .markov import DisconnectedChainError, MarkovConfig, markov_rank
from .metrics import F1Report, Triple, enumerate_triples, predict_f1, spearman

TRAIN_FRACTION = 0.75

#: Sweepable hyperparameters and their open domains.
SWEEPABLE = {
    (Algorithm.ELO, "k"): (0.0, np.inf),
    (Algorithm.MARKOV, "p"): (0.5, 1.0),
    (Algorithm.GLICKO, "initial_rd"): (0.0, np.inf),
}

#: Default sweep grids (100 linear points each).
DEFAULT_GRIDS = {
    (Algorithm.ELO, "k"): (1.0, 100.0, 100),
    (Algorithm.MARKOV, "p"): (0.51, 0.99, 100),
    (Algorithm.GLICKO, "initial_rd"): (30.0, 350.0, 100),
}


def parse_algorithm(name: str | Algorithm) -> Algorithm:
    """Accept enum members, canonical names, and hyphenated spellings."""
    if isinstance(name, Algorithm):
        return name
    try:
        return Algorithm(name.strip().lower().replace("-", "_"))
    except ValueError:
        raise ValueError(
            f"unknown algorithm {name!r}; expected one of "
            f"{[a.value for a in Algorithm]}"
        ) from None


@dataclass(frozen=True)
class AlgorithmConfigs:
    """One config per rating system, passed through by every experiment."""

    elo: EloConfig = EloConfig()
    bradley_terry: BtConfig = BtConfig()
    glicko: GlickoConfig = GlickoConfig()
    markov: MarkovConfig = MarkovConfig()
    markov_smoothing: float = 0.0


def fit_ranking(
    dataset: Dataset,
    algorithm: str | Algorithm,
    configs: AlgorithmConfigs = AlgorithmConfigs(),
) -> RankingResult:
    """Fit one ranking system on a dataset."""
    algorithm = parse_algorithm(algorithm)
    if algorithm is Algorithm.ELO:
        return elo_rank(dataset, configs.elo)
    if algorithm is Algorithm.BRADLEY_TERRY:
        return bt_fit(dataset, configs.bradley_terry)
    if algorithm is Algorithm.GLICKO:
        return glicko_rank(dataset, configs.glicko)
    if algorithm is Algorithm.MARKOV:
        return markov_rank(dataset, configs.markov, configs.markov_smoothing)
    return win_rate_ranking(dataset)


@dataclass(frozen=True)
class SweepSpec:
    """One-parameter sweep: explicit ``values`` or a ``(min, max, count)`` grid."""

    algorithm: Algorithm
    parameter: str
    values: tuple[float, ...] | None = None
    grid: tuple[float, float, int] | None = None
    repeats: int = 1
    split_seed: int = 0

    def __post_init__(self) -> None:
        if (self.values is None) == (self.grid is None):
            raise ValueError("exactly one of values/grid must be given")
        if self.repeats < 1:
            raise ValueError(f"repeats must be at least 1, got {self.repeats}")
        key = (self.algorithm, self.parameter)
        if key not in SWEEPABLE:
            sweepable = sorted(f"{a.value}.{p}" for a, p in SWEEPABLE)
            raise ValueError(
                f"cannot sweep {self.algorithm.value}.{self.parameter}; "
                f"sweepable parameters: {sweepable}"
            )
        if self.grid is not None:
            low, high, count = self.grid
            if count < 1:
                raise ValueError(f"grid count must be at least 1, got {count}")
            if low > high:
                raise ValueError(f"grid bounds out of order: {low} > {high}")
        lo, hi = SWEEPABLE[key]
        bad = [v for v in self.resolved_values() if not lo < v < hi]
        if bad:
            raise ValueError(
                f"{self.algorithm.value}.{self.parameter} values outside "
                f"({lo}, {hi}): {bad[:5]}"
            )

    def resolved_values(self) -> tuple[float, ...]:
        if self.values is not None:
            return tuple(float(v) for v in self.values)
        low, high, count = self.grid  # type: ignore[misc]
        if count == 1:
            return (float(low),)
        return tuple(float(v) for v in np.linspace(low, high, int(count)))


@dataclass(frozen=True)
class SweepPoint:
    value: float
    repeat: int
    overall_f1: float | None
    per_competitor_f1: dict[str, float] | None
    error: str | None = None


@dataclass(frozen=True)
class SweepReport:
    """F1 per sweep point plus the dispersion (std of overall F1) across points."""

    algorithm: Algorithm
    parameter: str
    points: tuple[SweepPoint, ...]
    dispersion: float
    split_seed: int
    train_fraction: float = TRAIN_FRACTION


def _sub_seed(split_seed: int, point: int, repeat: int) -> int:
    entropy = [split_seed & _SEED_MASK, point, repeat]
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


def _config_for_point(
    spec: SweepSpec, configs: AlgorithmConfigs, value: float, seed: int
) -> AlgorithmConfigs:
    if spec.algorithm is Algorithm.ELO:
        return dataclasses.replace(
            configs, elo=dataclasses.replace(configs.elo, k=value, seed=seed)
        )
    if spec.algorithm is Algorithm.MARKOV:
        return dataclasses.replace(
            configs, markov=dataclasses.replace(configs.markov, p=value)
        )
    return dataclasses.replace(
        configs, glicko=dataclasses.replace(configs.glicko, initial_rd=value)
    )


def run_sweep(
    dataset: Dataset,
    spec: SweepSpec,
    configs: AlgorithmConfigs = AlgorithmConfigs(),
) -> SweepReport:
    """Fit at every parameter value on a shared split and collect test F1.

    Fit failures are recorded per point rather than aborting the sweep.
    Repeats rerun a point with a fresh derived sub-seed (this only matters
    for stochastic fits such as permuted Elo).
    """
    train, test = split_dataset(dataset, TRAIN_FRACTION, spec.split_seed)
    points: list[SweepPoint] = []
    collected: list[float] = []
    for point_index, value in enumerate(spec.resolved_values()):
        for repeat in range(spec.repeats):
            seed = _sub_seed(spec.split_seed, point_index, repeat)
            try:
                point_configs = _config_for_point(spec, configs, value, seed)
                result = fit_ranking(train, spec.algorithm, point_configs)
                report = predict_f1(train, test, result)
            except (ConvergenceError, DisconnectedChainError, ValueError) as exc:
                points.append(SweepPoint(value, repeat, None, None, str(exc)))
                continue
            competitor_f1 = [s.f1 for s in report.per_competitor.values()]
            summary = {
                "min": min(competitor_f1),
                "mean": sum(competitor_f1) / len(competitor_f1),
                "max": max(competitor_f1),
            }
            points.append(SweepPoint(value, repeat, report.overall_f1, summary))
            collected.append(report.overall_f1)
    dispersion = float(np.std(collected)) if len(collected) > 1 else 0.0
    return SweepReport(
        algorithm=spec.algorithm,
        parameter=spec.parameter,
        points=tuple(points),
        dispersion=dispersion,
        split_seed=spec.split_seed,
    )


@dataclass(frozen=True)
class PermutationCell:
    """One (k, permutation count) cell of the stability grid."""

    k: float
    permutations: int
    mean_rating: dict[CompetitorId, float]
    rating_std: dict[CompetitorId, float]
    rating_se: dict[CompetitorId, float]
    rank: dict[CompetitorId, int]


@dataclass(frozen=True)
class PermutationStudy:
    cells: tuple[PermutationCell, ...]
    unstable: dict[CompetitorId, bool]
    k_values: tuple[float, ...]
    permutation_counts: tuple[int, ...]
    seed: int


def run_permutation_study(
    dataset: Dataset,
    k_values: list[float] | tuple[float, ...],
    permutation_counts: list[int] | tuple[int, ...],
    seed: int = 0,
) -> PermutationStudy:
    """Elo stability grid over k-factors and permutation counts.

    Each cell reports the permutation-mean rating, the rating spread across
    passes (``rating_std``), the standard error of the mean rating
    (``rating_se`` = std / sqrt(P), the stabilization measure), and the final
    rank. A competitor is flagged unstable when its rank differs between any
    two cells sharing a k-factor.
    """
    k_values = tuple(float(k) for k in k_values)
    permutation_counts = tuple(int(p) for p in permutation_counts)
    if not k_values or not permutation_counts:
        raise ValueError("k_values and permutation_counts must be non-empty")

    cells = []
    for k in k_values:
        for count in permutation_counts:
            result = elo_rank(
                dataset, EloConfig(k=k, permutations=count, seed=seed)
            )
            stds = result.metadata.get("theta_std") or {
                c: 0.0 for c in result.ratings
            }
            se = {
                c: (stds[c] / np.sqrt(count) if count > 0 else 0.0)
                for c in sorted(stds)
            }
            ranks = {c: n + 1 for n, c in enumerate(result.order)}
            cells.append(
                PermutationCell(
                    k=k,
                    permutations=count,
                    mean_rating={c: result.ratings[c].theta for c in sorted(result.ratings)},
                    rating_std={c: stds[c] for c in sorted(stds)},
                    rating_se=se,
                    rank=dict(sorted(ranks.items())),
                )
            )

    unstable = {}
    for competitor in sorted(cells[0].rank):
        flagged = False
        for k in k_values:
            ranks = {cell.rank[competitor] for cell in cells if cell.k == k}
            if len(ranks) > 1:
                flagged = True
                break
        unstable[competitor] = flagged
    return PermutationStudy(
        cells=tuple(cells),
        unstable=unstable,
        k_values=k_values,
        permutation_counts=permutation_counts,
        seed=seed,
    )


class TransitivitySummary(NamedTuple):
    triples: int
    preserved: int
    score: float | None


def _transitivity_summary(triples: list[Triple], result: RankingResult) -> TransitivitySummary:
    if not triples:
        return TransitivitySummary(0, 0, None)
    position = {c: n for n, c in enumerate(result.order)}
    preserved = sum(
        1 for i, j, k in triples if position[i] < position[j] < position[k]
    )
    return TransitivitySummary(len(triples), preserved, preserved / len(triples))


@dataclass(frozen=True)
class AlgorithmComparison:
    """Cross-algorithm report: transitivity, F1, and the Spearman matrix."""

    algorithms: tuple[Algorithm, ...]
    transitivity: dict[str, TransitivitySummary]
    f1: dict[str, F1Report]
    spearman_labels: tuple[str, ...]
    spearman_matrix: tuple[tuple[float, ...], ...]
    failures: dict[str, str]
    split_seed: int
    train_fraction: float = TRAIN_FRACTION


def compare_algorithms(
    dataset: Dataset,
    algorithms: list[str | Algorithm] | tuple[str | Algorithm, ...],
    split_seed: int = 0,
    configs: AlgorithmConfigs = AlgorithmConfigs(),
) -> AlgorithmComparison:
    """Run the requested systems plus the win-rate baseline on one shared split.

    Each algorithm fits the train half; transitivity is measured against the
    full dataset's majority triples, F1 against the held-out test half, and
    Spearman correlations between the fitted rankings (win-rate included).
    Per-algorithm failures are recorded and the comparison proceeds without
    them.
    """
    if not algorithms:
        raise ValueError("at least one algorithm is required")
    requested: list[Algorithm] = []
    for name in algorithms:
        algorithm = parse_algorithm(name)
        if algorithm not in requested:
            requested.append(algorithm)
    if Algorithm.WIN_RATE not in requested:
        requested.append(Algorithm.WIN_RATE)

    train, test = split_dataset(dataset, TRAIN_FRACTION, split_seed)
    triples = enumerate_triples(dataset)

    results: dict[str, RankingResult] = {}
    transitivity: dict[str, TransitivitySummary] = {}
    f1: dict[str, F1Report] = {}
    failures: dict[str, str] = {}
    for algorithm in requested:
        name = algorithm.value
        try:
            result = fit_ranking(train, algorithm, configs)
            transitivity[name] = _transitivity_summary(triples, result)
            f1[name] = predict_f1(train, test, result)
        except (ConvergenceError, DisconnectedChainError, ValueError) as exc:
            failures[name] = str(exc)
            continue
        results[name] = result

    labels = tuple(a.value for a in requested if a.value in results)
    matrix = []
    for row_label in labels:
        row = []
        for col_label in labels:
            if row_label == col_label:
                row.append(1.0)
            else:
                row.append(spearman(results[row_label], results[col_label]))
        matrix.append(tuple(row))
    return AlgorithmComparison(
        algorithms=tuple(requested),
        transitivity=transitivity,
        f1=f1,
        spearman_labels=labels,
        spearman_matrix=tuple(matrix),
        failures=failures,
        split_seed=split_seed,
    )


# --------------------------------------------------------------------------
# Report documents and serialization
# --------------------------------------------------------------------------


def _f1_section(report: F1Report) -> dict[str, object]:
    return {
        "overall": report.overall_f1,
        "per_competitor": {
            c: {"precision": s.precision, "recall": s.recall, "f1": s.f1}
            for c, s in report.per_competitor.items()
        },
        "directed_pairs": report.metadata.get("directed_pairs"),
        "excluded_pairs": report.metadata.get("excluded_pairs"),
    }


def _transitivity_section(summary: TransitivitySummary) -> dict[str, object]:
    return {
        "triples": summary.triples,
        "preserved": summary.preserved,
        "score": summary.score,
    }


def document(
    meta: dict[str, object],
    transitivity: dict | None = None,
    f1: dict | None = None,
    correlations: dict | None = None,
    sweep: dict | None = None,
    permutation: dict | None = None,
) -> dict[str, object]:
    """The fixed-section report skeleton shared by every verb."""
    return {
        "meta": meta,
        "transitivity": transitivity,
        "f1": f1,
        "correlations": correlations,
        "sweep": sweep,
        "permutation": permutation,
    }


def ranking_document(result: RankingResult) -> dict[str, object]:
    """Serializable view of a single ranking result."""
    return {
        "algorithm": result.algorithm.value,
        "hyperparameters": result.hyperparameters,
        "seed": result.seed,
        "ratings": {
            c: {"theta": r.theta, "sigma": r.sigma}
            for c, r in result.ratings.items()
        },
        "order": list(result.order),
        "metadata": {k: v for k, v in result.metadata.items()},
    }


def evaluation_sections(
    algorithm: Algorithm,
    summary: TransitivitySummary,
    report: F1Report,
) -> tuple[dict, dict]:
    """Transitivity and F1 sections for a single-algorithm evaluation."""
    name = algorithm.value
    return (
        {name: _transitivity_section(summary)},
        {name: _f1_section(report)},
    )


def comparison_sections(comparison: AlgorithmComparison) -> tuple[dict, dict, dict]:
    """Transitivity, F1 and correlation sections of a comparison report."""
    transitivity = {
        name: _transitivity_section(summary)
        for name, summary in comparison.transitivity.items()
    }
    f1 = {name: _f1_section(report) for name, report in comparison.f1.items()}
    correlations = {
        "labels": list(comparison.spearman_labels),
        "matrix": [list(row) for row in comparison.spearman_matrix],
    }
    return transitivity, f1, correlations


def sweep_section(report: SweepReport) -> dict[str, object]:
    return {
        "algorithm": report.algorithm.value,
        "parameter": report.parameter,
        "split_seed": report.split_seed,
        "train_fraction": report.train_fraction,
        "dispersion": report.dispersion,
        "points": [
            {
                "value": point.value,
                "repeat": point.repeat,
                "overall_f1": point.overall_f1,
                "per_competitor_f1": point.per_competitor_f1,
                "error": point.error,
            }
            for point in report.points
        ],
    }


def permutation_section(study: PermutationStudy) -> dict[str, object]:
    return {
        "k_values": list(study.k_values),
        "permutation_counts": list(study.permutation_counts),
        "seed": study.seed,
        "cells": [
            {
                "k": cell.k,
                "permutations": cell.permutations,
                "competitors": {
                    c: {
                        "mean_rating": cell.mean_rating[c],
                        "rating_std": cell.rating_std[c],
                        "rating_se": cell.rating_se[c],
                        "rank": cell.rank[c],
                    }
                    for c in sorted(cell.mean_rating)
                },
            }
            for cell in study.cells
        ],
        "unstable": dict(sorted(study.unstable.items())),
    }


def _encode(value, pieces: list[str], indent: int) -> None:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if value is None:
        pieces.append("null")
    elif isinstance(value, bool) or isinstance(value, np.bool_):
        pieces.append("true" if value else "false")
    elif isinstance(value, Enum):
        _encode(value.value, pieces, indent)
    elif isinstance(value, (int, np.integer)):
        pieces.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        value = float(value)
        if value != value or value in (float("inf"), float("-inf")):
            pieces.append("null")
        else:
            if value == 0.0:
                value = 0.0  # normalize -0.0
            # Six decimal places; values the fixed format cannot represent
            # (tiny tolerances, huge magnitudes) switch to scientific form.
            if value != 0.0 and not 1e-6 <= abs(value) < 1e16:
                pieces.append(f"{value:.6e}")
            else:
                pieces.append(f"{value:.6f}")
    elif isinstance(value, str):
        pieces.append(json.dumps(value))
    elif isinstance(value, dict):
        if not value:
            pieces.append("{}")
            return
        pieces.append("{\n")
        for number, (key, item) in enumerate(value.items()):
            pieces.append(inner + json.dumps(str(key)) + ": ")
            _encode(item, pieces, indent + 1)
            pieces.append(",\n" if number < len(value) - 1 else "\n")
        pieces.append(pad + "}")
    elif isinstance(value, (list, tuple)):
        if not len(value):
            pieces.append("[]")
            return
        pieces.append("[\n")
        for number, item in enumerate(value):
            pieces.append(inner)
            _encode(item, pieces, indent + 1)
            pieces.append(",\n" if number < len(value) - 1 else "\n")
        pieces.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}: {value!r}")


def to_json_text(document: dict[str, object]) -> str:
    """Render a report as deterministic JSON, floats with six decimal places."""
    pieces: list[str] = []
    _encode(document, pieces, 0)
    return "".join(pieces) + "\n"


def _format_cell(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if value != value:
            return "NA"
        if value != 0.0 and not 1e-6 <= abs(value) < 1e16:
            return f"{value:.6e}"
        return f"{value:.6f}"
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> Path:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(cell) for cell in row])
    return path


def write_report(document: dict[str, object], out_path: str | Path) -> list[Path]:
    """Write the JSON report plus companion per-table CSVs next to it.

    Returns all written paths, JSON first. CSV suffixes: ``.transitivity.csv``,
    ``.f1.csv``, ``.correlations.csv``, ``.sweep.csv``, ``.permutation.csv``.
    """
    out_path = Path(out_path)
    out_path.write_text(to_json_text(document), encoding="utf-8")
    stem = out_path.with_suffix("") if out_path.suffix == ".json" else out_path
    written = [out_path]

    def sibling(kind: str) -> Path:
        return stem.parent / f"{stem.name}.{kind}.csv"

    transitivity = document.get("transitivity")
    if transitivity:
        rows = [
            [name, entry["triples"], entry["preserved"], entry["score"]]
            for name, entry in transitivity.items()
        ]
        written.append(
            _write_csv(sibling("transitivity"), ["algorithm", "triples", "preserved", "score"], rows)
        )

    f1 = document.get("f1")
    if f1:
        rows = []
        for name, entry in f1.items():
            for competitor, scores in entry["per_competitor"].items():
                rows.append(
                    [name, competitor, scores["precision"], scores["recall"], scores["f1"]]
                )
            rows.append([name, "(all)", None, None, entry["overall"]])
        written.append(
            _write_csv(sibling("f1"), ["algorithm", "competitor", "precision", "recall", "f1"], rows)
        )

    correlations = document.get("correlations")
    if correlations:
        labels = correlations["labels"]
        rows = [
            [label] + list(row)
            for label, row in zip(labels, correlations["matrix"])
        ]
        written.append(
            _write_csv(sibling("correlations"), ["algorithm"] + list(labels), rows)
        )

    sweep = document.get("sweep")
    if sweep:
        rows = []
        for point in sweep["points"]:
            summary = point["per_competitor_f1"] or {}
            rows.append(
                [
                    point["value"],
                    point["repeat"],
                    point["overall_f1"],
                    summary.get("min"),
                    summary.get("mean"),
                    summary.get("max"),
                    point["error"] or "",
                ]
            )
        written.append(
            _write_csv(
                sibling("sweep"),
                ["value", "repeat", "overall_f1", "f1_min", "f1_mean", "f1_max", "error"],
                rows,
            )
        )

    permutation = document.get("permutation")
    if permutation:
        rows = []
        unstable = permutation["unstable"]
        for cell in permutation["cells"]:
            for competitor, entry in cell["competitors"].items():
                rows.append(
                    [
                        cell["k"],
                        cell["permutations"],
                        competitor,
                        entry["mean_rating"],
                        entry["rating_std"],
                        entry["rating_se"],
                        entry["rank"],
                        unstable[competitor],
                    ]
                )
        written.append(
            _write_csv(
                sibling("permutation"),
                [
                    "k",
                    "permutations",
                    "competitor",
                    "mean_rating",
                    "rating_std",
                    "rating_se",
                    "rank",
                    "unstable",
                ],
                rows,
            )
        )
    return written
