"""Bradley-Terry probability, likelihood, and the MLE fit."""

from __future__ import annotations

import math

import numpy as np
import pytest

from pairrank import (
    BtConfig,
    ConvergenceError,
    Dataset,
    MatchRecord,
    Outcome,
    bt_fit,
    bt_gradient,
    bt_log_likelihood,
    bt_probability,
)


def match(first, second, outcome, sequence):
    return MatchRecord(first, second, Outcome(outcome), sequence)


def head_to_head(a, b, wins_a, wins_b, ties=0, start=0):
    records = []
    t = start
    for _ in range(wins_a):
        records.append(match(a, b, "first", t)); t += 1
    for _ in range(wins_b):
        records.append(match(b, a, "first", t)); t += 1
    for _ in range(ties):
        records.append(match(a, b, "tie", t)); t += 1
    return records, t


def random_tallied_dataset(rng, competitors, low=1, high=10):
    """Every ordered pair gets at least `low` wins, so the MLE is finite."""
    records = []
    t = 0
    for i, a in enumerate(competitors):
        for b in competitors[i + 1 :]:
            chunk, t = head_to_head(a, b, int(rng.integers(low, high)), int(rng.integers(low, high)), start=t)
            records.extend(chunk)
    return Dataset.from_matches(records)


class TestProbability:
    def test_equal_strengths(self):
        assert bt_probability(0.0, 0.0) == 0.5

    def test_ln3_gap(self):
        assert bt_probability(math.log(3.0), 0.0) == pytest.approx(0.75, abs=1e-15)

    def test_complement(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            a, b = rng.normal(0, 2, size=2)
            assert bt_probability(a, b) + bt_probability(b, a) == pytest.approx(1.0, abs=1e-12)

    def test_extreme_logits_stable(self):
        assert bt_probability(1000.0, 0.0) == pytest.approx(1.0)
        assert bt_probability(-1000.0, 0.0) == pytest.approx(0.0)


class TestLogLikelihood:
    def test_single_match(self):
        dataset = Dataset.from_matches([match("A", "B", "first", 0)])
        value = bt_log_likelihood(dataset, {"A": 0.0, "B": 0.0})
        assert value == pytest.approx(math.log(0.5), abs=1e-12)

    def test_translation_invariance(self):
        rng = np.random.default_rng(1)
        dataset = random_tallied_dataset(rng, ("A", "B", "C"))
        thetas = {c: rng.normal() for c in dataset.roster}
        shifted = {c: v + 3.7 for c, v in thetas.items()}
        assert bt_log_likelihood(dataset, thetas) == pytest.approx(
            bt_log_likelihood(dataset, shifted), abs=1e-9
        )

    def test_matches_independent_summation(self):
        rng = np.random.default_rng(2)
        dataset = random_tallied_dataset(rng, ("A", "B", "C"))
        thetas = {c: rng.normal() for c in dataset.roster}
        # Term-by-term summation straight from the raw tallies.
        expected = 0.0
        for (a, b), tally in dataset.tallies.items():
            y = tally.wins + 0.5 * tally.ties
            p = 1.0 / (1.0 + math.exp(-(thetas[a] - thetas[b])))
            expected += y * math.log(p)
        assert bt_log_likelihood(dataset, thetas) == pytest.approx(expected, abs=1e-10)


class TestFit:
    def test_two_player_mle_vs_grid_search(self):
        records, _ = head_to_head("A", "B", 3, 1)
        dataset = Dataset.from_matches(records)
        result = bt_fit(dataset, BtConfig(regularization=0.0, tolerance=1e-12))
        p = bt_probability(result.ratings["A"].theta, result.ratings["B"].theta)
        assert p == pytest.approx(0.75, abs=1e-6)

        # 1-D grid search over the logit difference, coarse then refined.
        def likelihood(delta):
            q = 1.0 / (1.0 + math.exp(-delta))
            return 3.0 * math.log(q) + 1.0 * math.log(1.0 - q)

        low, high = -5.0, 5.0
        best = 0.0
        for _ in range(12):
            grid = np.linspace(low, high, 1001)
            best = max(grid, key=likelihood)
            width = (high - low) / 1000
            low, high = best - width, best + width
        assert 1.0 / (1.0 + math.exp(-best)) == pytest.approx(0.75, abs=1e-7)
        delta = result.ratings["A"].theta - result.ratings["B"].theta
        assert delta == pytest.approx(best, abs=1e-6)

    def test_symmetric_round_robin_all_zero(self):
        records = []
        t = 0
        for a, b in (("A", "B"), ("A", "C"), ("B", "C")):
            chunk, t = head_to_head(a, b, 1, 1, start=t)
            records.extend(chunk)
        result = bt_fit(Dataset.from_matches(records), BtConfig(regularization=0.0))
        for rating in result.ratings.values():
            assert rating.theta == pytest.approx(0.0, abs=1e-9)

    def test_gradient_vanishes_and_matches_finite_differences(self):
        rng = np.random.default_rng(3)
        dataset = random_tallied_dataset(rng, ("A", "B", "C", "D"))
        result = bt_fit(dataset, BtConfig(regularization=0.0, tolerance=1e-12, max_iters=5000))
        thetas = {c: r.theta for c, r in result.ratings.items()}
        gradient = bt_gradient(dataset, thetas)
        assert max(abs(g) for g in gradient.values()) < 1e-6

        step = 1e-5
        for c in dataset.roster:
            up = dict(thetas); up[c] += step
            down = dict(thetas); down[c] -= step
            numeric = (bt_log_likelihood(dataset, up) - bt_log_likelihood(dataset, down)) / (2 * step)
            scale = max(1.0, abs(gradient[c]))
            assert abs(numeric - gradient[c]) / scale < 1e-4

    def test_zero_sum_identification(self):
        rng = np.random.default_rng(4)
        dataset = random_tallied_dataset(rng, ("A", "B", "C", "D", "E"))
        result = bt_fit(dataset)
        assert sum(r.theta for r in result.ratings.values()) == pytest.approx(0.0, abs=1e-9)

    def test_monotone_in_evidence(self):
        previous = -math.inf
        for wins_a in range(1, 8):
            records, _ = head_to_head("A", "B", wins_a, 3)
            result = bt_fit(Dataset.from_matches(records), BtConfig(regularization=0.0))
            delta = result.ratings["A"].theta - result.ratings["B"].theta
            assert delta >= previous
            previous = delta

    def test_optimizer_independence(self):
        rng = np.random.default_rng(5)
        dataset = random_tallied_dataset(rng, ("A", "B", "C", "D"))
        config = BtConfig(tolerance=1e-10, max_iters=5000)
        from_zero = bt_fit(dataset, config)
        from_random = bt_fit(
            dataset, config, initial_thetas={c: rng.normal() for c in dataset.roster}
        )
        for c in dataset.roster:
            assert from_zero.ratings[c].theta == pytest.approx(
                from_random.ratings[c].theta, abs=10 * config.tolerance
            )

    def test_undefeated_without_regularization_diverges(self):
        records, _ = head_to_head("A", "B", 5, 0)
        dataset = Dataset.from_matches(records)
        with pytest.raises(ConvergenceError) as info:
            bt_fit(dataset, BtConfig(regularization=0.0, max_iters=50))
        assert info.value.result is not None
        assert info.value.gradient_norm is not None

    def test_undefeated_with_regularization_converges(self):
        records, _ = head_to_head("A", "B", 5, 0)
        result = bt_fit(Dataset.from_matches(records))
        assert result.metadata["converged"] is True
        assert result.ratings["A"].theta > result.ratings["B"].theta

    def test_weighted_downweights_lopsided_heavy_pair(self):
        # A dominates B over many matches; C splits with both over few.
        records, t = head_to_head("A", "B", 40, 10)
        chunk, t = head_to_head("A", "C", 2, 2, start=t)
        records += chunk
        chunk, t = head_to_head("B", "C", 2, 2, start=t)
        records += chunk
        dataset = Dataset.from_matches(records)
        plain = bt_fit(dataset, BtConfig(weighted=False))
        weighted = bt_fit(dataset, BtConfig(weighted=True))
        gap_plain = plain.ratings["A"].theta - plain.ratings["B"].theta
        gap_weighted = weighted.ratings["A"].theta - weighted.ratings["B"].theta
        assert gap_weighted < gap_plain
        assert weighted.order[0] == "A"

    def test_unrated_competitor_kept_at_zero(self):
        records, _ = head_to_head("A", "B", 2, 1)
        dataset = Dataset.from_matches(records, roster=["Z"])
        result = bt_fit(dataset, BtConfig(regularization=0.0))
        assert result.ratings["Z"].theta == 0.0
        assert result.metadata["unrated"] == ["Z"]

    def test_metadata_records_iterations_and_gradient(self):
        rng = np.random.default_rng(6)
        dataset = random_tallied_dataset(rng, ("A", "B", "C"))
        result = bt_fit(dataset)
        assert result.metadata["iterations"] >= 1
        assert result.metadata["gradient_norm"] >= 0.0


class TestConfig:
    def test_domains(self):
        with pytest.raises(ValueError):
            BtConfig(max_iters=0)
        with pytest.raises(ValueError):
            BtConfig(tolerance=0.0)
        with pytest.raises(ValueError):
            BtConfig(regularization=-1e-9)
