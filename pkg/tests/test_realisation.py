import unittest

import numpy as np
import pytest

from src.enumeration import expected_spread, outcome_matrix, reach_matrix
from src.errors import EnumerationTooLarge, InconsistentRealisation
from src.graph import Edge, InfluenceGraph
from src.realisation import (EMPTY, PartialRealisation, all_partial_realisations, edge_probabilities,
                             nested_pairs, observation_outcomes)


class TestPartialRealisation(unittest.TestCase):

    def setUp(self):
        self.chain = InfluenceGraph(3, (Edge(0, 1, 0.5), Edge(1, 2, 0.5)))

    def test_canonical_order(self):
        a = PartialRealisation.from_mapping({2: {2}, 0: {0, 1}})
        b = PartialRealisation.from_mapping({0: [1, 0], 2: [2]})
        self.assertEqual(a, b)
        self.assertEqual(hash(a), hash(b))
        self.assertEqual([v for v, _ in a], [0, 2])

    def test_views(self):
        psi = PartialRealisation.from_mapping({0: {0, 1}, 2: {2}})
        self.assertEqual(psi.dom, {0, 2})
        self.assertEqual(psi.image, {0, 1, 2})
        self.assertEqual(psi[0], {0, 1})
        self.assertIn(2, psi)
        self.assertNotIn(1, psi)
        self.assertEqual(psi.to_dict(), {"0": [0, 1], "2": [2]})
        with self.assertRaises(KeyError):
            psi[1]

    def test_inconsistent(self):
        with self.assertRaises(InconsistentRealisation):
            PartialRealisation.from_mapping({0: {1}})
        with self.assertRaises(InconsistentRealisation):
            PartialRealisation(((0, frozenset({0})), (0, frozenset({0, 1}))))
        with self.assertRaises(InconsistentRealisation):
            EMPTY.extend(0, {0}).extend(0, {0})
        with self.assertRaises(InconsistentRealisation):
            PartialRealisation.from_mapping({0: {0, 2}}).validate(self.chain)
        with self.assertRaises(InconsistentRealisation):
            PartialRealisation.from_mapping({5: {5}}).validate(self.chain)

    def test_sub_realisation(self):
        psi = PartialRealisation.from_mapping({0: {0, 1}, 1: {1}})
        self.assertTrue(EMPTY.is_subrealisation_of(psi))
        self.assertTrue(psi.restrict([0]).is_subrealisation_of(psi))
        self.assertFalse(PartialRealisation.from_mapping({0: {0}}).is_subrealisation_of(psi))

    def test_probability_and_key(self):
        psi = PartialRealisation.from_mapping({0: {0, 1}, 1: {1}})
        self.assertAlmostEqual(psi.probability(self.chain), 0.25)
        self.assertEqual(psi.key(self.chain), ((0, 1), (1, 0)))
        self.assertEqual(psi.fixed_edges(self.chain), {0: True, 1: False})
        self.assertEqual(EMPTY.probability(self.chain), 1.0)


def test_observation_outcomes():
    star = InfluenceGraph(3, (Edge(0, 1, 0.3), Edge(0, 2, 0.7)))
    outcomes = observation_outcomes(star, 0)
    assert [obs for obs, _ in outcomes] == [{0}, {0, 1}, {0, 2}, {0, 1, 2}]
    assert [p for _, p in outcomes] == pytest.approx([0.21, 0.09, 0.49, 0.21])
    assert observation_outcomes(star, 1) == [(frozenset({1}), 1.0)]


def test_positive_only_drops_impossible_outcomes():
    g = InfluenceGraph(2, (Edge(0, 1, 1.0),))
    assert observation_outcomes(g, 0, positive_only=True) == [(frozenset({0, 1}), 1.0)]
    assert len(observation_outcomes(g, 0)) == 2


def test_all_partial_realisations(single_edge):
    everything = list(all_partial_realisations(single_edge))
    assert len(everything) == 6
    assert len(set(everything)) == 6
    assert len(list(all_partial_realisations(single_edge, max_size=1))) == 4
    assert sum(psi.probability(single_edge) for psi in everything if len(psi) == 1) == pytest.approx(2.0)


def test_nested_pairs():
    psi = PartialRealisation.from_mapping({0: {0}, 2: {2}})
    pairs = list(nested_pairs([psi]))
    assert len(pairs) == 4
    assert all(inner.is_subrealisation_of(outer) for inner, outer in pairs)


def test_edge_probabilities(chain3):
    assert edge_probabilities(chain3, fixed={0: True}).tolist() == [1.0, 0.5]
    assert edge_probabilities(chain3, boosted={1}).tolist() == [0.5, 0.75]
    assert edge_probabilities(chain3, boosted={1}, shadow_fixed={1: False}).tolist() == [0.5, 0.5]
    assert edge_probabilities(chain3, boosted={1}, shadow_fixed={1: True}).tolist() == [0.5, 1.0]
    assert edge_probabilities(chain3, fixed={1: False}, boosted={1}).tolist() == [0.5, 0.0]


# ----------------------------------------------------------------------
# Enumeration engine
# ----------------------------------------------------------------------

def test_outcome_matrix_enumerates_free_edges_only():
    live, weight = outcome_matrix(np.array([0.5, 1.0, 0.0, 0.25]))
    assert live.shape == (4, 4)
    assert live[:, 1].all() and not live[:, 2].any()
    assert weight.sum() == pytest.approx(1.0)
    with pytest.raises(EnumerationTooLarge):
        outcome_matrix(np.full(3, 0.5), cap=2)


def test_reach_matrix(chain3):
    live = np.array([[True, True], [True, False], [False, True]])
    assert reach_matrix(chain3, live, [0]).sum(axis=1).tolist() == [3, 2, 1]
    assert not reach_matrix(chain3, live, []).any()


def test_expected_spread(chain3):
    assert expected_spread(chain3, {0}, chain3.probs) == pytest.approx(1.75)
    assert expected_spread(chain3, set(), chain3.probs) == 0.0
    assert expected_spread(chain3, {0}, np.array([1.0, 1.0])) == 3.0


if __name__ == "__main__":
    unittest.main()
