import unittest

import numpy as np
import pytest

from src.diffusion import MonteCarloEvaluator, conditional_spread, exact_spread, exact_two_level_spread
from src.errors import InvalidSeedError, PolicyViolation
from src.graph import Edge, InfluenceGraph, LiveEdgeGraph
from src.policies import (STOP, AdaptiveGreedyPolicy, AdaptivePolicy, ConstantPolicy, FunctionPolicy,
                          SelectionProbabilities, adaptive_greedy, adaptive_greedy_trace, estimate_policy,
                          evaluate_policy, hybrid_two_level_value, nonadaptive_greedy, observe, policy_leaves,
                          rand_t_value, reachable_realisations, run_policy, selection_probabilities,
                          strong_hybrid_value)
from src.realisation import EMPTY, PartialRealisation


def pick_then(first, second):
    return lambda psi: first if not psi.dom else second


class TestObserveAndRun(unittest.TestCase):

    def setUp(self):
        self.g = InfluenceGraph(4, (Edge(0, 1, 0.5), Edge(0, 2, 0.5), Edge(2, 3, 0.5)))

    def test_observe(self):
        live = LiveEdgeGraph(self.g, np.array([True, True, True]))
        dead = LiveEdgeGraph(self.g, np.array([False, False, True]))
        self.assertEqual(observe(live, 3), {3})
        self.assertEqual(observe(live, 0), {0, 1, 2})
        self.assertEqual(observe(dead, 0), {0})

    def test_constant_policy_ignores_feedback(self):
        pi = ConstantPolicy([2, 0])
        for bits in ([True, True, True], [False, False, False], [True, False, True]):
            psi = run_policy(pi, LiveEdgeGraph(self.g, np.array(bits)))
            self.assertEqual(psi.dom, {0, 2})

    def test_full_budget_covers_every_node(self):
        pi = AdaptiveGreedyPolicy(self.g, 4)
        psi = run_policy(pi, LiveEdgeGraph(self.g, np.array([True, False, True])))
        self.assertEqual(psi.dom, {0, 1, 2, 3})

    def test_observation_is_recorded(self):
        psi = run_policy(ConstantPolicy([0]), LiveEdgeGraph(self.g, np.array([False, True, False])))
        self.assertEqual(psi[0], {0, 2})

    def test_greedy_replay_is_deterministic(self):
        live = LiveEdgeGraph(self.g, np.array([True, False, True]))
        ev = MonteCarloEvaluator(samples=2_000, seed=9)
        first = run_policy(AdaptiveGreedyPolicy(self.g, 2, ev), live)
        second = run_policy(AdaptiveGreedyPolicy(self.g, 2, MonteCarloEvaluator(samples=2_000, seed=9)), live)
        self.assertEqual(first, second)


# ----------------------------------------------------------------------
# Contract violations
# ----------------------------------------------------------------------

class _StopsEarly(AdaptivePolicy):
    def decide(self, psi):
        return STOP


def test_policy_stopping_early_is_rejected(uvw):
    with pytest.raises(PolicyViolation):
        evaluate_policy(uvw, _StopsEarly(2))


def test_policy_repeating_a_seed_is_rejected(uvw):
    with pytest.raises(PolicyViolation):
        evaluate_policy(uvw, FunctionPolicy(2, lambda psi: 0))


def test_policy_naming_unknown_node_is_rejected(uvw):
    with pytest.raises(PolicyViolation):
        evaluate_policy(uvw, FunctionPolicy(1, lambda psi: 9))


def test_budget_larger_than_graph(uvw):
    with pytest.raises(PolicyViolation):
        evaluate_policy(uvw, ConstantPolicy([0, 1, 2, 0]))
    with pytest.raises(InvalidSeedError):
        AdaptiveGreedyPolicy(uvw, 4)
    with pytest.raises(InvalidSeedError):
        FunctionPolicy(0, lambda psi: 0)


# ----------------------------------------------------------------------
# Evaluation
# ----------------------------------------------------------------------

def test_constant_policy_value_equals_spread(chain3):
    assert evaluate_policy(chain3, ConstantPolicy([0, 2])) == pytest.approx(exact_spread(chain3, {0, 2}))


def test_full_budget_reaches_every_node(chain3):
    assert evaluate_policy(chain3, AdaptiveGreedyPolicy(chain3, 3)) == pytest.approx(3.0)


def test_pick_u_then_w(uvw):
    assert evaluate_policy(uvw, FunctionPolicy(2, pick_then(0, 2))) == pytest.approx(2.5)


def test_monte_carlo_policy_estimate(single_edge):
    est = estimate_policy(single_edge, ConstantPolicy([0]), samples=20_000, seed=1)
    assert est.mean == pytest.approx(1.5, abs=0.03)
    assert est == estimate_policy(single_edge, ConstantPolicy([0]), samples=20_000, seed=1)
    mc = MonteCarloEvaluator(samples=20_000, seed=1)
    assert evaluate_policy(single_edge, ConstantPolicy([0]), mc) == est.mean


def test_policy_leaves_cover_probability_mass(chain3):
    leaves = policy_leaves(chain3, AdaptiveGreedyPolicy(chain3, 2))
    assert sum(p for _, p in leaves) == pytest.approx(1.0)
    assert all(len(psi) == 2 for psi, _ in leaves)


def test_reachable_realisations_are_prefixes(uvw):
    pi = AdaptiveGreedyPolicy(uvw, 2)
    seen = reachable_realisations(uvw, pi)
    assert EMPTY in seen
    assert PartialRealisation.from_mapping({0: {0, 1}}) in seen
    assert all(len(psi) <= 1 for psi in seen)


# ----------------------------------------------------------------------
# Greedy
# ----------------------------------------------------------------------

class TestNonAdaptiveGreedy(unittest.TestCase):

    def test_single_pick(self):
        g = InfluenceGraph(3, (Edge(0, 1, 1.0),))
        trace = nonadaptive_greedy(g, 1)
        self.assertEqual(trace.seeds, (0,))
        self.assertAlmostEqual(trace.value, 2.0)

    def test_two_picks(self):
        g = InfluenceGraph(3, (Edge(0, 1, 0.9),))
        trace = nonadaptive_greedy(g, 2)
        self.assertEqual(trace.seeds, (0, 2))
        self.assertAlmostEqual(trace.values[0], 1.9, places=12)
        self.assertAlmostEqual(trace.values[1], 2.9, places=12)
        self.assertEqual(len(trace.gains), 2)

    def test_full_budget(self):
        g = InfluenceGraph(3, (Edge(0, 1, 0.3), Edge(1, 2, 0.7)))
        trace = nonadaptive_greedy(g, 3)
        self.assertEqual(sorted(trace.seeds), [0, 1, 2])
        self.assertAlmostEqual(trace.value, 3.0)

    def test_budget_out_of_range(self):
        g = InfluenceGraph(2)
        for k in (0, 3):
            with self.assertRaises(InvalidSeedError):
                nonadaptive_greedy(g, k)

    def test_ties_prefer_smaller_id(self):
        trace = nonadaptive_greedy(InfluenceGraph(3), 2)
        self.assertEqual(trace.seeds, (0, 1))

    def test_monte_carlo_is_reproducible(self):
        g = InfluenceGraph(3, (Edge(0, 1, 0.9),))
        a = nonadaptive_greedy(g, 2, MonteCarloEvaluator(samples=5_000, seed=7))
        b = nonadaptive_greedy(g, 2, MonteCarloEvaluator(samples=5_000, seed=7))
        self.assertEqual(a, b)
        self.assertEqual(a.seeds, (0, 2))


class TestAdaptiveGreedy(unittest.TestCase):

    def setUp(self):
        self.g = InfluenceGraph(3, (Edge(0, 1, 0.5),))

    def test_first_seed_matches_nonadaptive(self):
        pi = adaptive_greedy(self.g, 1)
        self.assertEqual(pi.decide(EMPTY), nonadaptive_greedy(self.g, 1).seeds[0])

    def test_decisions_follow_feedback(self):
        pi = adaptive_greedy(self.g, 2)
        self.assertEqual(pi.decide(PartialRealisation.from_mapping({0: {0, 1}})), 2)
        self.assertEqual(pi.decide(PartialRealisation.from_mapping({0: {0}})), 1)

    def test_decisions_with_monte_carlo_gains(self):
        pi = adaptive_greedy(self.g, 2, MonteCarloEvaluator(samples=5_000, seed=0))
        self.assertEqual(pi.decide(EMPTY), 0)
        self.assertEqual(pi.decide(PartialRealisation.from_mapping({0: {0, 1}})), 2)

    def test_stops_at_budget(self):
        pi = adaptive_greedy(self.g, 1)
        self.assertIs(pi.decide(PartialRealisation.from_mapping({0: {0}})), STOP)

    def test_value_and_trace(self):
        pi = adaptive_greedy(self.g, 2)
        self.assertAlmostEqual(evaluate_policy(self.g, pi), 2.5, places=12)
        trace = adaptive_greedy_trace(self.g, 2)
        self.assertAlmostEqual(trace[0], 1.5, places=12)
        self.assertAlmostEqual(trace[1], 2.5, places=12)

    def test_selection_probabilities(self):
        x = selection_probabilities(self.g, adaptive_greedy(self.g, 2))
        self.assertAlmostEqual(x[0], 1.0)
        self.assertAlmostEqual(x[1] + x[2], 1.0)
        self.assertAlmostEqual(x.total, 2.0)


def test_constant_selection_probabilities(chain3):
    assert selection_probabilities(chain3, ConstantPolicy([2, 0])).to_list() == [1.0, 0.0, 1.0]
    assert selection_probabilities(chain3, ConstantPolicy([0, 1, 2])).to_list() == [1.0, 1.0, 1.0]


# ----------------------------------------------------------------------
# Rand_t and the hybrid values
# ----------------------------------------------------------------------

def test_rand_t_value(chain3):
    x = SelectionProbabilities(np.array([0.0, 0.0, 2.0]))
    assert rand_t_value(chain3, {0}, x, 2) == pytest.approx(exact_spread(chain3, {0, 2}))
    full = SelectionProbabilities(np.array([1.0, 1.0, 0.0]))
    assert rand_t_value(chain3, {0, 1, 2}, full, 2) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        rand_t_value(chain3, {0}, SelectionProbabilities(np.array([1.0, 0.0, 0.0])), 2)


def test_hybrid_value_examples(chain3):
    assert hybrid_two_level_value(chain3, {0, 1, 2}, ConstantPolicy([0])) == pytest.approx(3.0)
    assert hybrid_two_level_value(chain3, set(), ConstantPolicy([0, 1])) == pytest.approx(
        exact_two_level_spread(chain3, {0, 1}), abs=1e-12)


def test_strong_hybrid_value_examples(chain3):
    assert strong_hybrid_value(chain3, EMPTY, ConstantPolicy([0])) == pytest.approx(
        exact_two_level_spread(chain3, {0}), abs=1e-12)
    psi = PartialRealisation.from_mapping({0: {0}, 1: {1, 2}, 2: {2}})
    assert strong_hybrid_value(chain3, psi, ConstantPolicy([1])) == pytest.approx(
        conditional_spread(chain3, psi), abs=1e-12)


if __name__ == "__main__":
    unittest.main()
