"""Markov-chain random-walker ranking.

A walker sits on the current competitor and, replaying a random past match,
moves to the opponent with probability ``p`` when the opponent won (and stays
with probability ``p`` when the current competitor won). Ties count half a
win for each side. The stationary distribution of the resulting row-stochastic
chain, found by power iteration, is the strength vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import (
    Algorithm,
    CompetitorId,
    ConvergenceError,
    Dataset,
    DatasetValidationError,
    Rating,
    RankingResult,
    make_result,
)


class DisconnectedChainError(RuntimeError):
    """The comparison graph splits into isolated groups; the stationary
    distribution would depend on the starting component."""


@dataclass(frozen=True)
class MarkovConfig:
    """Walker bias and power-iteration controls."""

    p: float = 0.8
    power_tol: float = 1e-12
    max_power_iters: int = 100000

    def __post_init__(self) -> None:
        if not 0.5 < self.p < 1.0:
            raise ValueError(f"walker bias p must lie in (0.5, 1), got {self.p}")
        if self.power_tol <= 0:
            raise ValueError(f"power_tol must be positive, got {self.power_tol}")
        if self.max_power_iters < 1:
            raise ValueError(
                f"max_power_iters must be at least 1, got {self.max_power_iters}"
            )


@dataclass(frozen=True)
class TransitionMatrix:
    """Dense row-stochastic matrix over the roster.

    ``uniform_rows`` lists competitors with zero matches, whose rows default
    to the uniform distribution so the chain stays well-defined. ``smoothing``
    records any uniform blending applied after construction.
    """

    entries: np.ndarray
    roster_index: dict[CompetitorId, int]
    uniform_rows: tuple[CompetitorId, ...] = ()
    smoothing: float = 0.0

    @property
    def roster(self) -> tuple[CompetitorId, ...]:
        return tuple(sorted(self.roster_index, key=self.roster_index.__getitem__))


def build_transition(dataset: Dataset, config: MarkovConfig = MarkovConfig()) -> TransitionMatrix:
    """Build the walker transition matrix from the dataset tallies.

    Off-diagonal entries are (wins_ij * (1-p) + losses_ij * p) / N_i with ties
    credited half to each side; the diagonal puts total wins behind weight p
    and total losses behind 1-p, so every row sums to one exactly.
    """
    roster = dataset.roster
    size = len(roster)
    if size == 0:
        raise DatasetValidationError("cannot build a transition matrix from an empty roster")
    index = {c: n for n, c in enumerate(roster)}

    wins = np.zeros((size, size))
    for (a, b), tally in dataset.tallies.items():
        wins[index[a], index[b]] = tally.wins + 0.5 * tally.ties
    losses = wins.T

    played = (wins + losses).sum(axis=1)
    entries = np.zeros((size, size))
    uniform = []
    p = config.p
    for i in range(size):
        if played[i] == 0:
            entries[i, :] = 1.0 / size
            uniform.append(roster[i])
            continue
        entries[i, :] = (wins[i] * (1.0 - p) + losses[i] * p) / played[i]
        entries[i, i] = (wins[i].sum() * p + losses[i].sum() * (1.0 - p)) / played[i]
    return TransitionMatrix(entries, index, tuple(uniform))


def smooth_transition(matrix: TransitionMatrix, epsilon: float) -> TransitionMatrix:
    """Blend a uniform escape probability into every row: (1-e) T + e/m.

    This is the explicit escape hatch for disconnected comparison graphs; it
    keeps rows stochastic while making the chain irreducible.
    """
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"smoothing epsilon must lie in [0, 1), got {epsilon}")
    if epsilon == 0.0:
        return matrix
    size = matrix.entries.shape[0]
    blended = (1.0 - epsilon) * matrix.entries + epsilon / size
    return TransitionMatrix(
        blended, matrix.roster_index, matrix.uniform_rows, smoothing=epsilon
    )


def _connected_components(adjacency: np.ndarray) -> list[list[int]]:
    size = adjacency.shape[0]
    seen = [False] * size
    components = []
    for start in range(size):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        component = []
        while stack:
            node = stack.pop()
            component.append(node)
            for neighbour in np.flatnonzero(adjacency[node]):
                if not seen[neighbour]:
                    seen[neighbour] = True
                    stack.append(int(neighbour))
        components.append(sorted(component))
    return components


def stationary(matrix: TransitionMatrix, config: MarkovConfig = MarkovConfig()) -> RankingResult:
    """Power-iterate from the uniform vector to the stationary distribution.

    Stops when the L1 change per iteration drops below ``power_tol``. The
    stationary probabilities become the strength scores.

    Raises:
        DisconnectedChainError: The comparison graph has more than one
            component (detected before iterating).
        ConvergenceError: Residual still above tolerance after
            ``max_power_iters`` iterations.
    """
    entries = matrix.entries
    size = entries.shape[0]
    row_sums = entries.sum(axis=1)
    if np.any(np.abs(row_sums - 1.0) > 1e-9) or np.any(entries < 0):
        raise ValueError("transition matrix must be row-stochastic")

    off_diagonal = entries.copy()
    np.fill_diagonal(off_diagonal, 0.0)
    adjacency = (off_diagonal > 0) | (off_diagonal.T > 0)
    components = _connected_components(adjacency)
    if len(components) > 1:
        roster = matrix.roster
        groups = [[roster[i] for i in component] for component in components]
        raise DisconnectedChainError(
            f"comparison graph is disconnected: {len(components)} components {groups}"
        )

    pi = np.full(size, 1.0 / size)
    iterations = 0
    for iterations in range(1, config.max_power_iters + 1):
        updated = pi @ entries
        updated /= updated.sum()
        change = float(np.abs(updated - pi).sum())
        pi = updated
        if change < config.power_tol:
            break
    else:
        residual = float(np.abs(pi @ entries - pi).sum())
        raise ConvergenceError(
            f"power iteration did not converge after {config.max_power_iters} "
            f"iterations (L1 residual {residual:.3e})",
            residual=residual,
        )

    residual = float(np.abs(pi @ entries - pi).sum())
    ratings = {c: Rating(float(pi[i])) for c, i in matrix.roster_index.items()}
    return make_result(
        Algorithm.MARKOV,
        ratings,
        {
            "p": config.p,
            "power_tol": config.power_tol,
            "max_power_iters": config.max_power_iters,
            "smoothing": matrix.smoothing,
        },
        metadata={
            "iterations": iterations,
            "residual": residual,
            "unrated": sorted(matrix.uniform_rows),
        },
    )


def markov_rank(
    dataset: Dataset,
    config: MarkovConfig = MarkovConfig(),
    smoothing: float = 0.0,
) -> RankingResult:
    """Build the transition matrix (optionally smoothed) and rank by its stationary vector."""
    matrix = build_transition(dataset, config)
    if smoothing > 0:
        matrix = smooth_transition(matrix, smoothing)
    return stationary(matrix, config)


def dump_matrix(matrix: TransitionMatrix, path: str | Path) -> None:
    """Write the matrix row-major, one row per line, space-separated decimals."""
    with Path(path).open("w", encoding="utf-8") as handle:
        for row in matrix.entries:
            handle.write(" ".join(f"{value:.17g}" for value in row) + "\n")
