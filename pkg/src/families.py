"""
Instance families for the verification and search commands.

Influence-graph families yield LabelledGraph items; the SMSM family yields
SmsmInstance items. Every family is deterministic for a fixed seed and is
built by Hydra from configs/family/*.yaml or configs/smsm/*.yaml.
"""

import logging
from itertools import combinations, permutations, product
from typing import Iterator, NamedTuple, Sequence

import networkx as nx
import numpy as np

from src.errors import InvalidInstance
from src.graph import Edge, InfluenceGraph
from src.smsm import CappedSum, Coverage, Modular, SmsmInstance, load_smsm_instance

log = logging.getLogger(__name__)

DEFAULT_GRID = (0.0, 0.3, 0.7, 1.0)
WEIGHT_LAWS = ("grid", "uniform", "constant")


class LabelledGraph(NamedTuple):
    label: str
    graph: InfluenceGraph


def _as_list(value) -> list:
    if isinstance(value, (list, tuple)):
        return list(value)
    if hasattr(value, "__iter__") and not isinstance(value, str):
        return list(value)
    return [value]


class _WeightLaw:
    """Draws one activation probability per edge."""

    def __init__(self, law: str, grid: Sequence[float], p: float):
        if law not in WEIGHT_LAWS:
            raise InvalidInstance(f"unknown weight law '{law}', expected one of {WEIGHT_LAWS}")
        if law == "grid" and not grid:
            raise InvalidInstance("the grid weight law needs a non-empty grid")
        self.law, self.grid, self.p = law, tuple(float(q) for q in grid), float(p)

    def draw(self, rng: np.random.Generator, count: int) -> list[float]:
        if self.law == "grid":
            return [self.grid[i] for i in rng.integers(0, len(self.grid), size=count)]
        if self.law == "uniform":
            return [float(q) for q in rng.random(count)]
        return [self.p] * count


def _from_digraph(dg: nx.DiGraph, probs: Sequence[float]) -> InfluenceGraph:
    edges = sorted(dg.edges())
    return InfluenceGraph(dg.number_of_nodes(), tuple(Edge(u, v, p) for (u, v), p in zip(edges, probs)))


class InstanceFamily:
    kind = "family"

    def __iter__(self) -> Iterator[LabelledGraph]:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"kind": self.kind}


class ErdosRenyiFamily(InstanceFamily):
    """Directed G(n, edge_prob) graphs with edge probabilities from a weight law."""
    kind = "erdos_renyi"

    def __init__(self, n: int = 5, edge_prob: float = 0.5, weight_law: str = "grid",
                 grid: Sequence[float] = DEFAULT_GRID, p: float = 0.5, count: int = 100, seed: int = 0):
        if n < 1 or not (0.0 <= edge_prob <= 1.0) or count < 0:
            raise InvalidInstance("erdos_renyi needs n >= 1, edge_prob in [0, 1], count >= 0")
        self.n, self.edge_prob, self.count, self.seed = n, edge_prob, count, seed
        self.weights = _WeightLaw(weight_law, grid, p)

    def __len__(self):
        return self.count

    def __iter__(self):
        for idx, child in enumerate(np.random.SeedSequence(self.seed).spawn(self.count)):
            rng = np.random.default_rng(child)
            dg = nx.gnp_random_graph(self.n, self.edge_prob, seed=int(rng.integers(0, 2 ** 31)), directed=True)
            g = _from_digraph(dg, self.weights.draw(rng, dg.number_of_edges()))
            yield LabelledGraph(f"erdos_renyi[{idx}]", g)

    def describe(self):
        return {"kind": self.kind, "n": self.n, "edge_prob": self.edge_prob, "weight_law": self.weights.law,
                "count": self.count, "seed": self.seed}


class StarFamily(InstanceFamily):
    """Out-stars: centre 0 points to every leaf."""
    kind = "star"

    def __init__(self, leaves=3, p=0.5):
        self.leaves, self.p = _as_list(leaves), _as_list(p)

    def __iter__(self):
        for leaves, p in product(self.leaves, self.p):
            dg = nx.DiGraph()
            dg.add_edges_from(nx.star_graph(int(leaves)).edges())
            yield LabelledGraph(f"star(leaves={leaves}, p={p})", _from_digraph(dg, [p] * dg.number_of_edges()))

    def describe(self):
        return {"kind": self.kind, "leaves": self.leaves, "p": self.p}


class ChainFamily(InstanceFamily):
    """Directed paths 0 -> 1 -> ... -> n-1."""
    kind = "chain"

    def __init__(self, n=4, p=0.5):
        self.n, self.p = _as_list(n), _as_list(p)

    def __iter__(self):
        for n, p in product(self.n, self.p):
            dg = nx.path_graph(int(n), create_using=nx.DiGraph)
            yield LabelledGraph(f"chain(n={n}, p={p})", _from_digraph(dg, [p] * dg.number_of_edges()))

    def describe(self):
        return {"kind": self.kind, "n": self.n, "p": self.p}


class BipartiteFamily(InstanceFamily):
    """Complete bipartite graphs with every edge directed from side A (0..a-1) to side B."""
    kind = "bipartite"

    def __init__(self, a=2, b=2, p=0.5):
        self.a, self.b, self.p = _as_list(a), _as_list(b), _as_list(p)

    def __iter__(self):
        for a, b, p in product(self.a, self.b, self.p):
            ug = nx.complete_bipartite_graph(int(a), int(b))
            dg = nx.DiGraph()
            dg.add_nodes_from(ug.nodes())
            dg.add_edges_from((u, v) if u < v else (v, u) for u, v in ug.edges())
            yield LabelledGraph(f"bipartite(a={a}, b={b}, p={p})", _from_digraph(dg, [p] * dg.number_of_edges()))

    def describe(self):
        return {"kind": self.kind, "a": self.a, "b": self.b, "p": self.p}


def canonical_form(n: int, edges: Sequence[Edge]) -> tuple:
    """Smallest relabelled edge list over all node permutations."""
    return min(tuple(sorted((perm[u], perm[v], p) for u, v, p in edges)) for perm in permutations(range(n)))


class ExhaustiveSmallFamily(InstanceFamily):
    """
    Every influence graph with n_min <= n <= n_max nodes and at most max_edges
    edges, each edge probability drawn from prob_grid. A grid value of 0 gives an
    explicit never-live edge. With dedupe, isomorphic copies are skipped.
    """
    kind = "exhaustive_small"

    def __init__(self, n_max: int = 3, prob_grid: Sequence[float] = DEFAULT_GRID, max_edges: int | None = None,
                 dedupe: bool = True, n_min: int = 1):
        if n_max < 1 or n_min < 1:
            raise InvalidInstance("exhaustive_small needs n_min, n_max >= 1")
        self.n_min, self.n_max = n_min, n_max
        self.grid = tuple(float(p) for p in prob_grid)
        self.max_edges = max_edges
        self.dedupe = dedupe

    def __iter__(self):
        for n in range(self.n_min, self.n_max + 1):
            pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
            top = len(pairs) if self.max_edges is None else min(self.max_edges, len(pairs))
            seen: set = set()
            idx = 0
            for size in range(top + 1):
                for chosen in combinations(pairs, size):
                    for probs in product(self.grid, repeat=size):
                        edges = [Edge(u, v, p) for (u, v), p in zip(chosen, probs)]
                        if self.dedupe:
                            key = canonical_form(n, edges)
                            if key in seen:
                                continue
                            seen.add(key)
                        yield LabelledGraph(f"exhaustive(n={n})[{idx}]", InfluenceGraph(n, tuple(edges)))
                        idx += 1
            log.debug(f"[Families] exhaustive n={n}: {idx} graphs")

    def describe(self):
        return {"kind": self.kind, "n_min": self.n_min, "n_max": self.n_max, "prob_grid": list(self.grid),
                "max_edges": self.max_edges, "dedupe": self.dedupe}


class EmptyFamily(InstanceFamily):
    kind = "empty"

    def __iter__(self):
        return iter(())


# ----------------------------------------------------------------------
# SMSM
# ----------------------------------------------------------------------

SMSM_KINDS = ("modular", "capped_sum", "coverage")


class RandomSmsmFamily:
    """
    Random SMSM instances with binary item states (0 or a positive value),
    n in [n_min, n_max], k drawn from k_values, objectives cycling through kinds.
    """
    kind = "random_smsm"

    def __init__(self, count: int = 200, n_min: int = 2, n_max: int = 5, k_values: Sequence[int] = (2, 3),
                 kinds: Sequence[str] = SMSM_KINDS, elements: int = 3, seed: int = 0):
        unknown = set(kinds) - set(SMSM_KINDS)
        if unknown:
            raise InvalidInstance(f"unknown objective kinds {sorted(unknown)}")
        if n_min < 1 or n_max < n_min or not k_values or min(k_values) < 1:
            raise InvalidInstance("random_smsm needs 1 <= n_min <= n_max and positive k values")
        self.count, self.n_min, self.n_max = count, n_min, n_max
        self.k_values, self.kinds, self.elements, self.seed = tuple(k_values), tuple(kinds), elements, seed

    def __len__(self):
        return self.count

    def _objective(self, kind: str, n: int, rng: np.random.Generator):
        if kind == "modular":
            return Modular(rng.integers(1, 4, size=n).astype(float))
        if kind == "capped_sum":
            return CappedSum(rng.integers(1, 3, size=n).astype(float), float(rng.integers(1, 5)))
        a = rng.integers(0, 3, size=(n, self.elements)).astype(float)
        return Coverage(a, rng.integers(1, 4, size=self.elements).astype(float))

    def __iter__(self) -> Iterator[SmsmInstance]:
        for idx, child in enumerate(np.random.SeedSequence(self.seed).spawn(self.count)):
            rng = np.random.default_rng(child)
            k = int(rng.choice(self.k_values))
            n = int(rng.integers(max(k, self.n_min), max(k, self.n_max) + 1))
            items = []
            for _ in range(n):
                q = float(rng.choice((0.25, 0.5, 0.75)))
                items.append(((0.0, 1.0 - q), (float(rng.integers(1, 4)), q)))
            yield SmsmInstance(n, k, tuple(items), self._objective(self.kinds[idx % len(self.kinds)], n, rng))

    def describe(self):
        return {"kind": self.kind, "count": self.count, "n_min": self.n_min, "n_max": self.n_max,
                "k_values": list(self.k_values), "kinds": list(self.kinds), "seed": self.seed}


class SmsmFileFamily:
    """A single SMSM instance loaded from JSON."""
    kind = "smsm_file"

    def __init__(self, path: str):
        self.path = path

    def __iter__(self):
        yield load_smsm_instance(self.path)

    def describe(self):
        return {"kind": self.kind, "path": self.path}
