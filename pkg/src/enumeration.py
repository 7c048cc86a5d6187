"""
Vectorised enumeration engine.

Every exact quantity in the package is an expectation of a realised spread over
independent edge bits, each edge live with its own probability. Edges with
probability 0 or 1 are deterministic; only the remaining "free" edges are
enumerated, 2^free rows at a time, and reachability is propagated for all rows
at once with numpy boolean arithmetic.
"""

import logging
from functools import lru_cache

import numpy as np

from src.errors import EnumerationTooLarge
from src.graph import InfluenceGraph

log = logging.getLogger(__name__)

DEFAULT_CAP = 20


def boost(p):
    """Probability that at least one of two independent chances fires."""
    return 1.0 - (1.0 - p) ** 2


def free_edge_count(probs: np.ndarray) -> int:
    return int(np.count_nonzero((probs > 0.0) & (probs < 1.0)))


def outcome_matrix(probs: np.ndarray, cap: int = DEFAULT_CAP) -> tuple[np.ndarray, np.ndarray]:
    """
    All live/dead assignments of the edges.
    Returns (live, weight): live is bool (rows, m), weight sums to 1.
    """
    probs = np.asarray(probs, dtype=np.float64)
    free = np.flatnonzero((probs > 0.0) & (probs < 1.0))
    if len(free) > cap:
        raise EnumerationTooLarge(len(free), cap)
    rows = 1 << len(free)
    bits = ((np.arange(rows)[:, None] >> np.arange(len(free))) & 1).astype(bool)
    live = np.repeat((probs >= 1.0)[None, :], rows, axis=0)
    live[:, free] = bits
    q = probs[free]
    weight = np.prod(np.where(bits, q, 1.0 - q), axis=1)
    return live, weight


def reach_matrix(g: InfluenceGraph, live: np.ndarray, seeds) -> np.ndarray:
    """Active-node matrix (rows, n): row r marks R_L(seeds) for the live edges of row r."""
    rows = live.shape[0]
    active = np.zeros((rows, g.n), dtype=bool)
    seeds = list(seeds)
    if not seeds or rows == 0:
        return active
    active[:, seeds] = True
    if g.m == 0:
        return active
    src, tgt = g.sources, g.targets
    # at most n sweeps; each sweep extends every path by at least one hop
    for _ in range(g.n):
        changed = False
        for e in range(g.m):
            fire = live[:, e] & active[:, src[e]] & ~active[:, tgt[e]]
            if fire.any():
                active[:, tgt[e]] |= fire
                changed = True
        if not changed:
            break
    return active


def spread_counts(g: InfluenceGraph, live: np.ndarray, seeds) -> np.ndarray:
    return reach_matrix(g, live, seeds).sum(axis=1)


@lru_cache(maxsize=1 << 16)
def _expected_spread_cached(g: InfluenceGraph, seeds: frozenset, probs: tuple, cap: int) -> float:
    live, weight = outcome_matrix(np.array(probs, dtype=np.float64), cap)
    counts = spread_counts(g, live, sorted(seeds))
    return float(np.dot(weight, counts))


def expected_spread(g: InfluenceGraph, seeds, probs: np.ndarray, cap: int = DEFAULT_CAP) -> float:
    """E[ sigma_L(seeds) ] with edge e live independently with probability probs[e]."""
    seeds = frozenset(seeds)
    if not seeds:
        return 0.0
    return _expected_spread_cached(g, seeds, tuple(float(p) for p in probs), cap)


def clear_cache() -> None:
    _expected_spread_cached.cache_clear()
