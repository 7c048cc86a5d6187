"""
Expected spread under the ordinary, 2-level and strong 2-level diffusion models.

Exact values enumerate the free edge bits (see src.enumeration); Monte Carlo
values average realised spreads over live-edge graphs drawn from per-chunk
random streams derived from (master seed, stream key, chunk index), so serial
and threaded execution give identical numbers.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from src.enumeration import DEFAULT_CAP, expected_spread, outcome_matrix, spread_counts
from src.graph import InfluenceGraph, LiveEdgeGraph, NodeId
from src.realisation import EMPTY, PartialRealisation, edge_probabilities

log = logging.getLogger(__name__)

CHUNK = 4096
Z_95 = 1.96


# ----------------------------------------------------------------------
# Types
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class SpreadEstimate:
    """Monte Carlo estimate of an expected spread with its 95% half width."""
    mean: float
    samples: int
    half_width: float

    @classmethod
    def from_counts(cls, counts: np.ndarray) -> "SpreadEstimate":
        counts = np.asarray(counts, dtype=np.float64)
        samples = len(counts)
        if samples == 0:
            raise ValueError("samples must be >= 1")
        sd = float(counts.std(ddof=1)) if samples > 1 else 0.0
        return cls(float(counts.mean()), samples, Z_95 * sd / math.sqrt(samples))

    def to_dict(self) -> dict:
        return {"mean": self.mean, "samples": self.samples, "half_width": self.half_width}


@dataclass(frozen=True)
class LivePair:
    """(L, L-hat): two independent, identically distributed live-edge graphs."""
    base: LiveEdgeGraph
    shadow: LiveEdgeGraph

    def __post_init__(self):
        if self.base.parent != self.shadow.parent:
            raise ValueError("base and shadow must share the same parent graph")


# ----------------------------------------------------------------------
# Random streams
# ----------------------------------------------------------------------

def stream_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def _chunk_sizes(samples: int) -> list[int]:
    full, rest = divmod(samples, CHUNK)
    return [CHUNK] * full + ([rest] if rest else [])


def sample_live_matrix(g: InfluenceGraph, samples: int, seed: int, stream: tuple = (),
                       probs: np.ndarray | None = None) -> np.ndarray:
    """(samples, m) bool matrix of live-edge draws; chunk c uses stream (seed, *stream, c)."""
    probs = g.probs if probs is None else probs
    parts = [stream_rng(seed, *stream, c).random((size, g.m)) < probs
             for c, size in enumerate(_chunk_sizes(samples))]
    return np.concatenate(parts, axis=0) if parts else np.zeros((0, g.m), dtype=bool)


# ----------------------------------------------------------------------
# Ordinary model
# ----------------------------------------------------------------------

def estimate_spread(g: InfluenceGraph, seeds: Iterable[NodeId], samples: int, seed: int,
                    workers: int = 1, stream: tuple = ()) -> SpreadEstimate:
    """Average realised spread over `samples` independent live-edge draws."""
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    seeds = sorted(g.seed_set(seeds))

    def run_chunk(args):
        c, size = args
        live = stream_rng(seed, *stream, c).random((size, g.m)) < g.probs
        return spread_counts(g, live, seeds)

    jobs = list(enumerate(_chunk_sizes(samples)))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_chunk, jobs))
    else:
        parts = [run_chunk(job) for job in jobs]
    return SpreadEstimate.from_counts(np.concatenate(parts))


def exact_spread(g: InfluenceGraph, seeds: Iterable[NodeId], cap: int = DEFAULT_CAP) -> float:
    """sigma(S) by enumeration of every live-edge graph."""
    return expected_spread(g, g.seed_set(seeds), g.probs, cap)


def marginal_gain(g: InfluenceGraph, seeds: Iterable[NodeId], v: NodeId, cap: int = DEFAULT_CAP,
                  samples: int | None = None, seed: int = 0) -> float:
    """Delta_S(v) = sigma(S + v) - sigma(S); Monte Carlo when `samples` is given."""
    seeds = g.seed_set(seeds)
    v = g.check_node(v)
    if v in seeds:
        return 0.0
    if samples is not None:
        live = sample_live_matrix(g, samples, seed)
        diff = spread_counts(g, live, sorted(seeds | {v})) - spread_counts(g, live, sorted(seeds))
        return float(diff.mean())
    return max(0.0, exact_spread(g, seeds | {v}, cap) - exact_spread(g, seeds, cap))


# ----------------------------------------------------------------------
# 2-level model
# ----------------------------------------------------------------------

def two_level_graph(pair: LivePair, seeds: Iterable[NodeId]) -> LiveEdgeGraph:
    """L^2(S) = L  union  (L-hat restricted to edges leaving S)."""
    g = pair.base.parent
    seeds = g.seed_set(seeds)
    from_seed = np.isin(g.sources, list(seeds)) if seeds else np.zeros(g.m, dtype=bool)
    return LiveEdgeGraph(g, pair.base.present | (pair.shadow.present & from_seed))


def exact_two_level_spread(g: InfluenceGraph, seeds: Iterable[NodeId], cap: int = DEFAULT_CAP) -> float:
    """sigma^2(S): seed-out edges live with probability 1-(1-p)^2, the rest with p."""
    seeds = g.seed_set(seeds)
    return expected_spread(g, seeds, edge_probabilities(g, boosted=seeds), cap)


def exact_two_level_spread_joint(g: InfluenceGraph, seeds: Iterable[NodeId], cap: int = DEFAULT_CAP) -> float:
    """sigma^2(S) by joint enumeration of L and the shadow bits of seed-out edges."""
    seeds = g.seed_set(seeds)
    if not seeds:
        return 0.0
    shadow_idx = np.array([idx for v in sorted(seeds) for idx in g.out_edges[v]], dtype=np.int64)
    probs = np.concatenate([g.probs, g.probs[shadow_idx]])
    bits, weight = outcome_matrix(probs, cap)
    live = bits[:, :g.m].copy()
    for col, idx in enumerate(shadow_idx):
        live[:, idx] |= bits[:, g.m + col]
    return float(np.dot(weight, spread_counts(g, live, sorted(seeds))))


def two_level_marginal(g: InfluenceGraph, seeds: Iterable[NodeId], v: NodeId, cap: int = DEFAULT_CAP) -> float:
    """Delta^2_S(v): only v gets the second chance; the rest of S spreads as usual."""
    seeds = g.seed_set(seeds)
    v = g.check_node(v)
    if v in seeds:
        return 0.0
    boosted = expected_spread(g, seeds | {v}, edge_probabilities(g, boosted={v}), cap)
    return boosted - exact_spread(g, seeds, cap)


# ----------------------------------------------------------------------
# Conditioning on observed feedback
# ----------------------------------------------------------------------

def conditional_spread(g: InfluenceGraph, psi: PartialRealisation, extra: Iterable[NodeId] = (),
                       cap: int = DEFAULT_CAP) -> float:
    """E[ sigma_L(dom(psi) + extra) | psi subset of Phi ]."""
    seeds = psi.dom | g.seed_set(extra)
    return expected_spread(g, seeds, edge_probabilities(g, fixed=psi.fixed_edges(g)), cap)


def strong_two_level_conditional_spread(g: InfluenceGraph, psi: PartialRealisation,
                                        extra: Iterable[NodeId] = (), cap: int = DEFAULT_CAP) -> float:
    """sigma^2_psi(dom(psi) + extra): the nodes of extra outside dom(psi) get two chances."""
    extra = g.seed_set(extra)
    probs = edge_probabilities(g, fixed=psi.fixed_edges(g), boosted=extra - psi.dom)
    return expected_spread(g, psi.dom | extra, probs, cap)


def conditional_marginal(g: InfluenceGraph, psi: PartialRealisation, v: NodeId, cap: int = DEFAULT_CAP) -> float:
    """Delta_psi(v)."""
    if v in psi.dom:
        return 0.0
    return conditional_spread(g, psi, {v}, cap) - conditional_spread(g, psi, (), cap)


def strong_two_level_marginal(g: InfluenceGraph, psi: PartialRealisation, v: NodeId,
                              cap: int = DEFAULT_CAP) -> float:
    """Delta^2_psi(v) = Delta^2_psi(v | empty)."""
    return strong_adaptive_marginal(g, psi, EMPTY, v, cap)


def _shadow_fixed(g: InfluenceGraph, psi_hat: PartialRealisation, sources: frozenset) -> dict[int, bool]:
    fixed = psi_hat.fixed_edges(g)
    return {idx: on for idx, on in fixed.items() if g.edges[idx].source in sources}


def adaptive_two_level_marginal(g: InfluenceGraph, seeds: Iterable[NodeId], psi_hat: PartialRealisation,
                                v: NodeId, cap: int = DEFAULT_CAP) -> float:
    """
    Delta^2_S(v | psi-hat): gain of adding v to S + dom(psi-hat) in the 2-level model,
    where the nodes of S spread once, the nodes of dom(psi-hat) - S get a second chance
    whose outcome psi-hat has already revealed, and v gets a fresh second chance.
    """
    seeds = g.seed_set(seeds)
    v = g.check_node(v)
    dom_hat = psi_hat.dom
    if v in seeds or v in dom_hat:
        return 0.0
    boosted_nodes = dom_hat - seeds
    shadow = _shadow_fixed(g, psi_hat, boosted_nodes)
    before = expected_spread(g, seeds | dom_hat, edge_probabilities(g, shadow_fixed=shadow), cap)
    after = expected_spread(g, seeds | dom_hat | {v},
                            edge_probabilities(g, boosted={v}, shadow_fixed=shadow), cap)
    return after - before


def strong_adaptive_marginal(g: InfluenceGraph, psi: PartialRealisation, psi_hat: PartialRealisation,
                             v: NodeId, cap: int = DEFAULT_CAP) -> float:
    """
    Delta^2_psi(v | psi-hat) in the strong 2-level model: edges out of dom(psi) follow psi,
    second chances of dom(psi-hat) - dom(psi) follow psi-hat, v gets a fresh second chance.
    """
    v = g.check_node(v)
    dom, dom_hat = psi.dom, psi_hat.dom
    if v in dom or v in dom_hat:
        return 0.0
    fixed = psi.fixed_edges(g)
    shadow = _shadow_fixed(g, psi_hat, dom_hat - dom)
    before = expected_spread(g, dom | dom_hat, edge_probabilities(g, fixed=fixed, shadow_fixed=shadow), cap)
    after = expected_spread(g, dom | dom_hat | {v},
                            edge_probabilities(g, fixed=fixed, boosted={v}, shadow_fixed=shadow), cap)
    return after - before


# ----------------------------------------------------------------------
# Evaluators (Hydra targets: configs/mode/*.yaml)
# ----------------------------------------------------------------------

class ExactEvaluator:
    """Exact spreads by enumeration; `batch` is a no-op."""
    mode = "exact"

    def __init__(self, cap: int = DEFAULT_CAP, **kwargs):
        self.cap = int(cap)
        self.config = kwargs

    def batch(self, g: InfluenceGraph, *key: int):
        return None

    def spread(self, g: InfluenceGraph, seeds: Iterable[NodeId], batch=None) -> float:
        return exact_spread(g, seeds, self.cap)

    def conditional(self, g: InfluenceGraph, psi: PartialRealisation, extra: Iterable[NodeId] = (),
                    batch=None) -> float:
        return conditional_spread(g, psi, extra, self.cap)

    def describe(self) -> dict:
        return {"mode": self.mode, "cap": self.cap}


class MonteCarloEvaluator:
    """
    Monte Carlo spreads with common random numbers: one batch of live-edge
    graphs evaluates every candidate compared within the same step.
    """
    mode = "mc"

    def __init__(self, samples: int = 10_000, seed: int = 0, workers: int = 1, **kwargs):
        if samples < 1:
            raise ValueError(f"mc mode requires samples >= 1, got {samples}")
        self.samples = int(samples)
        self.seed = int(seed)
        self.workers = int(workers)
        self.config = kwargs

    def batch(self, g: InfluenceGraph, *key: int) -> np.ndarray:
        return sample_live_matrix(g, self.samples, self.seed, stream=key)

    def spread(self, g: InfluenceGraph, seeds: Iterable[NodeId], batch=None) -> float:
        live = self.batch(g) if batch is None else batch
        return float(spread_counts(g, live, sorted(g.seed_set(seeds))).mean())

    def conditional(self, g: InfluenceGraph, psi: PartialRealisation, extra: Iterable[NodeId] = (),
                    batch=None) -> float:
        """Unconditioned bits come from the batch; edges leaving dom(psi) follow psi."""
        live = (self.batch(g) if batch is None else batch).copy()
        for idx, on in psi.fixed_edges(g).items():
            live[:, idx] = on
        return float(spread_counts(g, live, sorted(psi.dom | g.seed_set(extra))).mean())

    def estimate(self, g: InfluenceGraph, seeds: Iterable[NodeId], *key: int) -> SpreadEstimate:
        return estimate_spread(g, seeds, self.samples, self.seed, self.workers, stream=key)

    def describe(self) -> dict:
        return {"mode": self.mode, "samples": self.samples, "seed": self.seed}
