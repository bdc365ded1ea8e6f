"""Synthetic tournament generation: determinism, outcome model, matchmaking styles."""

from __future__ import annotations

import math

import numpy as np
import pytest

from pairrank import Dataset, Outcome, SimConfig, generate, load_dataset, save_dataset
from pairrank.simulator import competitor_ids, save_ground_truth


class TestConfig:
    def test_too_few_competitors(self):
        with pytest.raises(ValueError):
            SimConfig(n_competitors=1, n_matches=10)

    def test_logit_length_checked(self):
        with pytest.raises(ValueError):
            SimConfig(n_competitors=3, n_matches=10, true_logits=(1.0, 0.0))

    def test_style_checked(self):
        with pytest.raises(ValueError):
            SimConfig(n_competitors=3, n_matches=10, style="ladder")

    def test_tie_rate_domain(self):
        with pytest.raises(ValueError):
            SimConfig(n_competitors=3, n_matches=10, tie_rate=1.0)


class TestGenerate:
    def test_deterministic_per_seed(self):
        config = SimConfig(n_competitors=6, n_matches=500, style="arena", seed=3)
        first, truth_a = generate(config)
        second, truth_b = generate(config)
        assert first == second
        assert truth_a == truth_b
        third, _ = generate(SimConfig(n_competitors=6, n_matches=500, style="arena", seed=4))
        assert third != first

    def test_default_logits_evenly_spaced(self):
        _, truth = generate(SimConfig(n_competitors=5, n_matches=10, seed=0))
        values = [truth[c] for c in sorted(truth)]
        assert values == pytest.approx([2.0, 1.0, 0.0, -1.0, -2.0])

    def test_roster_covers_everyone(self):
        dataset, truth = generate(
            SimConfig(n_competitors=30, n_matches=50, style="arena", seed=1)
        )
        assert dataset.roster == competitor_ids(30)
        assert set(truth) == set(dataset.roster)

    def test_two_player_win_rate_concentrates(self):
        # p(first beats second) = logistic(ln 3) = 0.75; binomial check.
        dataset, _ = generate(
            SimConfig(
                n_competitors=2,
                n_matches=10_000,
                true_logits=(math.log(3.0), 0.0),
                seed=11,
            )
        )
        strong = competitor_ids(2)[0]
        wins = dataset.wins(strong)
        assert wins / 10_000 == pytest.approx(0.75, abs=0.02)

    def test_empirical_rates_match_logistic_model(self):
        logits = (1.0, 0.2, -0.4)
        dataset, truth = generate(
            SimConfig(n_competitors=3, n_matches=30_000, true_logits=logits, seed=7)
        )
        ids = competitor_ids(3)
        for i in range(3):
            for j in range(i + 1, 3):
                tally = dataset.tally(ids[i], ids[j])
                n = tally.wins + tally.losses
                p = 1.0 / (1.0 + math.exp(-(logits[i] - logits[j])))
                # Three binomial standard errors.
                margin = 3.0 * math.sqrt(p * (1 - p) / n)
                assert tally.wins / n == pytest.approx(p, abs=margin)

    def test_tie_rate(self):
        dataset, _ = generate(
            SimConfig(n_competitors=4, n_matches=20_000, tie_rate=0.3, seed=9)
        )
        ties = sum(1 for m in dataset.matches if m.outcome is Outcome.TIE)
        assert ties / 20_000 == pytest.approx(0.3, abs=0.02)

    def test_controlled_style_near_uniform_pairs(self):
        # 10 competitors, 45 pairs, 4500 matches: ~100 per pair; multinomial
        # 3-sigma bound per pair and a small coefficient of variation.
        dataset, _ = generate(SimConfig(n_competitors=10, n_matches=4500, seed=13))
        ids = competitor_ids(10)
        counts = []
        for i in range(10):
            for j in range(i + 1, 10):
                tally = dataset.tally(ids[i], ids[j])
                counts.append(tally.wins + tally.losses + tally.ties)
        counts = np.array(counts, dtype=float)
        sigma = math.sqrt(4500 * (1 / 45) * (1 - 1 / 45))
        assert np.all(np.abs(counts - 100.0) <= 3.0 * sigma)
        assert counts.std() / counts.mean() < 0.15

    def test_arena_style_skews_match_counts(self):
        dataset, _ = generate(
            SimConfig(n_competitors=12, n_matches=20_000, style="arena", seed=2)
        )
        played = [dataset.matches_played(c) for c in dataset.roster]
        assert max(played) >= 5 * max(min(played), 1)

    def test_arena_more_skewed_than_controlled(self):
        arena, _ = generate(
            SimConfig(n_competitors=10, n_matches=10_000, style="arena", seed=5)
        )
        controlled, _ = generate(
            SimConfig(n_competitors=10, n_matches=10_000, style="controlled", seed=5)
        )
        spread = lambda d: np.std([d.matches_played(c) for c in d.roster])
        assert spread(arena) > 3 * spread(controlled)


class TestEmission:
    def test_dataset_round_trip_through_csv(self, tmp_path):
        dataset, truth = generate(SimConfig(n_competitors=4, n_matches=60, tie_rate=0.1, seed=21))
        path = tmp_path / "synth.csv"
        save_dataset(dataset, path)
        loaded = load_dataset(path)
        assert loaded.matches == dataset.matches
        assert loaded.tallies == dataset.tallies

    def test_ground_truth_sidecar(self, tmp_path):
        _, truth = generate(SimConfig(n_competitors=3, n_matches=10, seed=0))
        path = tmp_path / "synth.truth.csv"
        save_ground_truth(truth, path)
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "competitor,logit"
        parsed = {row.split(",")[0]: float(row.split(",")[1]) for row in lines[1:]}
        assert parsed == pytest.approx(truth)
