import unittest

import numpy as np
import pytest

from src.diffusion import (LivePair, MonteCarloEvaluator, ExactEvaluator, adaptive_two_level_marginal,
                           conditional_marginal, conditional_spread, estimate_spread, exact_spread,
                           exact_two_level_spread, exact_two_level_spread_joint, marginal_gain,
                           strong_adaptive_marginal, strong_two_level_conditional_spread,
                           strong_two_level_marginal, two_level_graph, two_level_marginal)
from src.enumeration import boost, free_edge_count, outcome_matrix
from src.errors import EnumerationTooLarge
from src.graph import Edge, InfluenceGraph, LiveEdgeGraph
from src.realisation import EMPTY, PartialRealisation

LIVE = PartialRealisation.from_mapping({0: {0, 1}})
DEAD = PartialRealisation.from_mapping({0: {0}})


class TestExactSpread(unittest.TestCase):

    def setUp(self):
        self.single = InfluenceGraph(2, (Edge(0, 1, 0.5),))
        self.chain = InfluenceGraph(3, (Edge(0, 1, 0.5), Edge(1, 2, 0.5)))
        self.converging = InfluenceGraph(3, (Edge(0, 2, 0.5), Edge(1, 2, 0.5)))

    def test_known_values(self):
        self.assertAlmostEqual(exact_spread(self.single, {0}), 1.5, places=12)
        self.assertAlmostEqual(exact_spread(self.chain, {0}), 1.75, places=12)
        self.assertAlmostEqual(exact_spread(self.converging, {0, 1}), 2.75, places=12)

    def test_empty_seed_set(self):
        self.assertEqual(exact_spread(self.chain, set()), 0.0)

    def test_deterministic_edges_are_not_enumerated(self):
        g = InfluenceGraph(3, (Edge(0, 1, 1.0), Edge(1, 2, 0.0)))
        self.assertEqual(free_edge_count(g.probs), 0)
        self.assertEqual(exact_spread(g, {0}, cap=0), 2.0)

    def test_cap_refusal(self):
        with self.assertRaises(EnumerationTooLarge) as ctx:
            exact_spread(self.chain, {0}, cap=1)
        self.assertEqual((ctx.exception.required, ctx.exception.cap), (2, 1))

    def test_outcome_weights_sum_to_one(self):
        _, weight = outcome_matrix(np.array([0.3, 0.7, 1.0, 0.0]))
        self.assertAlmostEqual(weight.sum(), 1.0, places=12)


class TestTwoLevel(unittest.TestCase):

    def setUp(self):
        self.single = InfluenceGraph(2, (Edge(0, 1, 0.5),))
        self.chain = InfluenceGraph(3, (Edge(0, 1, 0.5), Edge(1, 2, 0.5)))

    def test_exact_values(self):
        self.assertAlmostEqual(exact_two_level_spread(self.single, {0}), 1.75, places=12)
        self.assertAlmostEqual(exact_two_level_spread(self.chain, {0}), 2.125, places=12)
        self.assertEqual(exact_two_level_spread(self.chain, set()), 0.0)

    def test_joint_enumeration_matches_boosted_form(self):
        for seeds in ({0}, {1}, {0, 2}, {0, 1, 2}):
            self.assertAlmostEqual(exact_two_level_spread_joint(self.chain, seeds),
                                   exact_two_level_spread(self.chain, seeds), places=12)

    def test_boost(self):
        self.assertAlmostEqual(boost(0.5), 0.75)
        self.assertEqual(boost(1.0), 1.0)
        self.assertEqual(boost(0.0), 0.0)

    def test_two_level_graph(self):
        g = self.chain
        base = LiveEdgeGraph(g, np.array([False, True]))
        shadow = LiveEdgeGraph(g, np.array([True, True]))
        pair = LivePair(base, shadow)
        self.assertEqual(two_level_graph(pair, set()), base)
        self.assertEqual(two_level_graph(pair, {0}).present.tolist(), [True, True])
        self.assertEqual(two_level_graph(LivePair(LiveEdgeGraph(g, np.array([True, False])), shadow), {2})
                         .present.tolist(), [True, False])

    def test_two_level_graph_all_seeds(self):
        g = self.chain
        pair = LivePair(LiveEdgeGraph(g, np.zeros(2, dtype=bool)), LiveEdgeGraph(g, np.ones(2, dtype=bool)))
        self.assertTrue(two_level_graph(pair, {0, 1, 2}).present.all())

    def test_pair_needs_same_parent(self):
        with self.assertRaises(ValueError):
            LivePair(LiveEdgeGraph(self.single, np.array([True])), LiveEdgeGraph(self.chain, np.ones(2, dtype=bool)))


# ----------------------------------------------------------------------
# Marginals
# ----------------------------------------------------------------------

def test_marginal_gain_examples(single_edge):
    assert marginal_gain(single_edge, {0}, 0) == 0.0
    assert marginal_gain(single_edge, set(), 0) == pytest.approx(1.5)
    isolated = InfluenceGraph(3, (Edge(0, 1, 0.5),))
    assert marginal_gain(isolated, {0}, 2) == pytest.approx(1.0)


def test_marginal_gain_monte_carlo(single_edge):
    est = marginal_gain(single_edge, set(), 0, samples=20_000, seed=3)
    assert est == pytest.approx(1.5, abs=0.03)
    assert est == marginal_gain(single_edge, set(), 0, samples=20_000, seed=3)


def test_two_level_marginal_examples(single_edge):
    isolated = InfluenceGraph(2)
    assert two_level_marginal(isolated, set(), 1) == pytest.approx(1.0)
    assert two_level_marginal(single_edge, set(), 0) == pytest.approx(1.75)
    assert two_level_marginal(single_edge, {0}, 0) == 0.0


def test_adaptive_marginal_without_feedback_is_two_level_marginal(chain3):
    for seeds in (set(), {0}, {2}):
        for v in range(3):
            assert adaptive_two_level_marginal(chain3, seeds, EMPTY, v) == pytest.approx(
                two_level_marginal(chain3, seeds, v), abs=1e-12)


def test_strong_marginal_without_feedback_is_two_level_marginal(chain3):
    for v in range(3):
        assert strong_two_level_marginal(chain3, EMPTY, v) == pytest.approx(
            two_level_marginal(chain3, set(), v), abs=1e-12)


def test_strong_marginal_zero_inside_observed(chain3):
    psi = PartialRealisation.from_mapping({1: {1, 2}})
    assert strong_adaptive_marginal(chain3, psi, EMPTY, 1) == 0.0
    assert strong_adaptive_marginal(chain3, EMPTY, psi, 1) == 0.0


# ----------------------------------------------------------------------
# Conditioning
# ----------------------------------------------------------------------

def test_conditional_spread_examples(single_edge, converging):
    assert conditional_spread(converging, EMPTY, {0, 1}) == pytest.approx(exact_spread(converging, {0, 1}))
    assert conditional_spread(single_edge, LIVE) == pytest.approx(2.0)
    assert conditional_spread(single_edge, DEAD) == pytest.approx(1.0)


def test_conditional_marginal(single_edge):
    assert conditional_marginal(single_edge, LIVE, 1) == pytest.approx(0.0)
    assert conditional_marginal(single_edge, DEAD, 1) == pytest.approx(1.0)
    assert conditional_marginal(single_edge, DEAD, 0) == 0.0


def test_strong_conditional_spread_examples(single_edge, chain3):
    assert strong_two_level_conditional_spread(single_edge, DEAD) == pytest.approx(
        conditional_spread(single_edge, DEAD))
    assert strong_two_level_conditional_spread(chain3, EMPTY, {0}) == pytest.approx(
        exact_two_level_spread(chain3, {0}))
    assert strong_two_level_conditional_spread(single_edge, DEAD, {1}) == pytest.approx(2.0)


# ----------------------------------------------------------------------
# Monte Carlo
# ----------------------------------------------------------------------

def test_estimate_empty_seed_set(chain3):
    est = estimate_spread(chain3, set(), samples=500, seed=0)
    assert (est.mean, est.half_width) == (0.0, 0.0)


@pytest.mark.parametrize("edges,expected", [
    (((0, 1, 0.5),), 1.5),
    (((0, 1, 0.5), (0, 2, 0.5)), 2.0),
])
def test_estimate_matches_closed_form(edges, expected):
    g = InfluenceGraph(3, tuple(Edge(*e) for e in edges))
    est = estimate_spread(g, {0}, samples=100_000, seed=11)
    assert est.mean == pytest.approx(expected, abs=0.02)
    assert est.samples == 100_000


def test_estimate_is_deterministic_across_workers(chain3):
    serial = estimate_spread(chain3, {0}, samples=10_000, seed=7)
    threaded = estimate_spread(chain3, {0}, samples=10_000, seed=7, workers=3)
    assert serial == threaded
    assert serial != estimate_spread(chain3, {0}, samples=10_000, seed=8)


CALIBRATION_EDGES = ((0, 1, 0.5), (0, 2, 0.4), (1, 3, 0.6), (2, 3, 0.3), (3, 4, 0.5), (1, 4, 0.2), (4, 5, 0.7),
                     (2, 5, 0.4))


@pytest.mark.slow
def test_interval_covers_exact_spread():
    g = InfluenceGraph(6, tuple(Edge(*e) for e in CALIBRATION_EDGES))
    exact = exact_spread(g, {0})
    hits = sum(abs(est.mean - exact) <= est.half_width
               for est in (estimate_spread(g, {0}, samples=10_000, seed=s) for s in range(200)))
    # nominal 95%; 183 of 200 is the 1% lower binomial quantile at that level
    assert hits >= 183, hits / 200


def test_estimate_rejects_zero_samples(chain3):
    with pytest.raises(ValueError):
        estimate_spread(chain3, {0}, samples=0, seed=0)


def test_monte_carlo_evaluator(chain3):
    ev = MonteCarloEvaluator(samples=20_000, seed=5)
    batch = ev.batch(chain3, 1, 0)
    assert ev.spread(chain3, {0}, batch) == pytest.approx(1.75, abs=0.03)
    psi = PartialRealisation.from_mapping({0: {0}})
    assert ev.conditional(chain3, psi, (), batch) == 1.0
    assert ev.describe() == {"mode": "mc", "samples": 20_000, "seed": 5}
    with pytest.raises(ValueError):
        MonteCarloEvaluator(samples=0)


def test_exact_evaluator(chain3):
    ev = ExactEvaluator(cap=4)
    assert ev.batch(chain3, 1) is None
    assert ev.spread(chain3, {0}) == pytest.approx(1.75)
    assert ev.conditional(chain3, PartialRealisation.from_mapping({0: {0, 1}})) == pytest.approx(2.5)


if __name__ == "__main__":
    unittest.main()
