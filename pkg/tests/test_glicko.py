"""Glicko damping factor, expected score, update equations, and ranking pass."""

from __future__ import annotations

import math

import numpy as np
import pytest

from pairrank import (
    Dataset,
    EloConfig,
    GlickoConfig,
    MatchRecord,
    Outcome,
    Rating,
    elo_expected,
    elo_rank,
    glicko_expected,
    glicko_g,
    glicko_rank,
    glicko_update,
)
from pairrank.glicko import Q
from pairrank.simulator import SimConfig, generate


def match(first, second, outcome, sequence):
    return MatchRecord(first, second, Outcome(outcome), sequence)


class TestG:
    def test_zero_deviation(self):
        assert glicko_g(0.0) == 1.0

    def test_g_350(self):
        # Frozen from a direct evaluation of 1/sqrt(1 + 3 q^2 sigma^2 / pi^2).
        assert glicko_g(350.0) == pytest.approx(0.6690693971819845, abs=1e-12)

    def test_strictly_decreasing(self):
        grid = np.linspace(0.0, 500.0, 100)
        values = [glicko_g(s) for s in grid]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert all(0.0 < v <= 1.0 for v in values)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            glicko_g(-1.0)


class TestExpected:
    def test_zero_gap(self):
        for sigma in (0.0, 50.0, 350.0):
            assert glicko_expected(1500.0, 1500.0, sigma) == 0.5

    def test_sigma_zero_is_elo(self):
        assert glicko_expected(1900.0, 1500.0, 0.0) == pytest.approx(
            10.0 / 11.0, abs=1e-15
        )
        assert glicko_expected(1900.0, 1500.0, 0.0) == elo_expected(1900.0, 1500.0)

    def test_uncertainty_shrinks_towards_half(self):
        certain = glicko_expected(1900.0, 1500.0, 0.0)
        uncertain = glicko_expected(1900.0, 1500.0, 350.0)
        assert 0.5 < uncertain < certain

    def test_elo_degeneracy_on_random_pairs(self):
        rng = np.random.default_rng(12)
        for _ in range(1000):
            a, b = rng.normal(1500, 400, size=2)
            assert glicko_expected(a, b, 0.0) == pytest.approx(
                elo_expected(a, b), abs=1e-12
            )


class TestUpdate:
    def test_win_from_even(self):
        updated = glicko_update(Rating(1500.0, 350.0), [(Rating(1500.0, 350.0), 1.0)])
        assert updated.theta > 1500.0
        assert updated.sigma < 350.0

    def test_zero_innovation_still_shrinks_sigma(self):
        updated = glicko_update(Rating(1500.0, 350.0), [(Rating(1500.0, 350.0), 0.5)])
        assert updated.theta == 1500.0
        assert updated.sigma < 350.0

    def test_worked_example(self):
        # Frozen from a scripted formula-by-formula evaluation:
        # theta 1500 (sigma 200) beats theta 1700 (sigma 30).
        updated = glicko_update(Rating(1500.0, 200.0), [(Rating(1700.0, 30.0), 1.0)])
        assert updated.theta == pytest.approx(1640.2222629769913, abs=1e-9)
        assert updated.sigma == pytest.approx(179.57542431760615, abs=1e-9)

    def test_min_rd_clamp(self):
        updated = glicko_update(Rating(1500.0, 40.0), [(Rating(1500.0, 40.0), 1.0)], min_rd=39.9)
        assert updated.sigma == 39.9

    def test_deviation_monotone_under_random_schedules(self):
        rng = np.random.default_rng(5)
        rating = Rating(1500.0, 350.0)
        for _ in range(100):
            opponent = Rating(rng.normal(1500, 200), rng.uniform(0, 350))
            score = float(rng.choice([0.0, 0.5, 1.0]))
            updated = glicko_update(rating, [(opponent, score)], min_rd=30.0)
            assert updated.sigma <= rating.sigma
            assert updated.sigma >= 30.0
            rating = updated

    def test_bounded_step(self):
        rng = np.random.default_rng(6)
        for _ in range(200):
            sigma = rng.uniform(1.0, 350.0)
            rating = Rating(rng.normal(1500, 300), sigma)
            opponents = [
                (Rating(rng.normal(1500, 300), rng.uniform(0, 350)),
                 float(rng.choice([0.0, 0.5, 1.0])))
                for _ in range(rng.integers(1, 4))
            ]
            updated = glicko_update(rating, opponents)
            inv_d2 = Q * Q * sum(
                glicko_g(o.sigma) ** 2 * glicko_expected(rating.theta, o.theta, o.sigma)
                * (1 - glicko_expected(rating.theta, o.theta, o.sigma))
                for o, _ in opponents
            )
            bound = Q / (1.0 / sigma**2 + inv_d2) * sum(
                glicko_g(o.sigma) for o, _ in opponents
            )
            assert abs(updated.theta - rating.theta) <= bound + 1e-9

    def test_empty_opponents_rejected(self):
        with pytest.raises(ValueError):
            glicko_update(Rating(1500.0, 350.0), [])


class TestRank:
    def test_empty_dataset(self):
        dataset = Dataset.from_matches([], roster=["A", "B"])
        result = glicko_rank(dataset)
        assert all(r.theta == 1500.0 and r.sigma == 350.0 for r in result.ratings.values())

    def test_more_matches_smaller_sigma(self):
        heavy = [match("A", "B", "first" if t % 2 else "second", t) for t in range(50)]
        light = [match("C", "D", "first" if t % 2 else "second", 50 + t) for t in range(5)]
        result = glicko_rank(Dataset.from_matches(heavy + light))
        assert result.ratings["A"].sigma < result.ratings["C"].sigma

    def test_small_rd_reproduces_elo_order(self):
        # With a tiny frozen deviation the update degenerates to Elo with an
        # effective k of q * sigma^2; orderings should coincide on separated
        # strengths.
        dataset, _ = generate(
            SimConfig(
                n_competitors=5,
                n_matches=600,
                true_logits=(2.0, 1.0, 0.0, -1.0, -2.0),
                seed=17,
            )
        )
        sigma0 = 30.0
        glicko_result = glicko_rank(
            dataset, GlickoConfig(initial_rd=sigma0, min_rd=0.0)
        )
        elo_result = elo_rank(
            dataset, EloConfig(k=Q * sigma0 * sigma0, initial_rating=1500.0)
        )
        assert glicko_result.order == elo_result.order

    def test_determinism(self):
        dataset, _ = generate(SimConfig(n_competitors=6, n_matches=200, seed=2))
        assert glicko_rank(dataset) == glicko_rank(dataset)


class TestConfig:
    def test_initial_rd_positive(self):
        with pytest.raises(ValueError):
            GlickoConfig(initial_rd=0.0)

    def test_min_rd_not_above_initial(self):
        with pytest.raises(ValueError):
            GlickoConfig(initial_rd=30.0, min_rd=31.0)
