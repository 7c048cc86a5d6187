"""
Influence graph core: representation, edge-list parsing, live-edge sampling
and realised spread.

Edge-list format:
    first line  : n (node count, ids are 0..n-1)
    other lines : "u v p"  (directed edge u -> v with activation probability p)
    '#' lines   : comments; blank lines are ignored; LF or CRLF.
"""

import io
import logging
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, TextIO

import numpy as np

from src.errors import GraphFormatError, InvalidSeedError

log = logging.getLogger(__name__)

NodeId = int
SeedSet = frozenset  # frozenset[NodeId]


class Edge(NamedTuple):
    source: NodeId
    target: NodeId
    prob: float


def _edge_problem(n: int, u: int, v: int, p: float, seen: set) -> str | None:
    if not (0 <= u < n and 0 <= v < n):
        return f"node id out of range [0, {n}) in edge ({u}, {v})"
    if u == v:
        return f"self-loop on node {u}"
    if not (0.0 <= p <= 1.0):
        return f"probability {p} outside [0, 1]"
    if (u, v) in seen:
        return f"duplicate edge ({u}, {v})"
    return None


@dataclass(frozen=True)
class InfluenceGraph:
    """Directed graph with one activation probability per edge. Immutable."""
    n: int
    edges: tuple[Edge, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n < 0:
            raise InvalidSeedError(f"node count must be non-negative, got {self.n}")
        edges = tuple(Edge(int(u), int(v), float(p)) for u, v, p in self.edges)
        object.__setattr__(self, "edges", edges)
        seen: set = set()
        for u, v, p in edges:
            problem = _edge_problem(self.n, u, v, p, seen)
            if problem:
                raise InvalidSeedError(problem)
            seen.add((u, v))

    # ------------------------------------------------------------------
    # Indexes (built once, graphs are immutable)
    # ------------------------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def sources(self) -> np.ndarray:
        return np.array([e.source for e in self.edges], dtype=np.int64)

    @cached_property
    def targets(self) -> np.ndarray:
        return np.array([e.target for e in self.edges], dtype=np.int64)

    @cached_property
    def probs(self) -> np.ndarray:
        return np.array([e.prob for e in self.edges], dtype=np.float64)

    @cached_property
    def out_edges(self) -> tuple[tuple[int, ...], ...]:
        """Edge indices leaving each node, ordered by target id."""
        buckets: list[list[int]] = [[] for _ in range(self.n)]
        for idx, e in enumerate(self.edges):
            buckets[e.source].append(idx)
        return tuple(tuple(sorted(b, key=lambda i: self.edges[i].target)) for b in buckets)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {(e.source, e.target): idx for idx, e in enumerate(self.edges)}

    def out_neighbors(self, v: NodeId) -> tuple[NodeId, ...]:
        return tuple(self.edges[i].target for i in self.out_edges[v])

    @property
    def nodes(self) -> range:
        return range(self.n)

    def check_node(self, v: NodeId) -> NodeId:
        if not (0 <= v < self.n):
            raise InvalidSeedError(f"node {v} outside [0, {self.n})")
        return int(v)

    def seed_set(self, seeds: Iterable[NodeId]) -> SeedSet:
        return frozenset(self.check_node(v) for v in seeds)


# ----------------------------------------------------------------------
# Parsing / formatting
# ----------------------------------------------------------------------

def parse_graph(text: str | TextIO) -> InfluenceGraph:
    """Parses the edge-list format; every failure carries its 1-based line number."""
    stream = io.StringIO(text) if isinstance(text, str) else text
    n = None
    edges: list[Edge] = []
    seen: set = set()

    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 1:
                raise GraphFormatError(lineno, f"expected node count, got '{line}'")
            try:
                n = int(parts[0])
            except ValueError:
                raise GraphFormatError(lineno, f"node count is not an integer: '{parts[0]}'") from None
            if n < 0:
                raise GraphFormatError(lineno, f"node count must be non-negative, got {n}")
            continue

        if len(parts) != 3:
            raise GraphFormatError(lineno, f"expected 'u v p', got '{line}'")
        try:
            u, v, p = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise GraphFormatError(lineno, f"malformed edge '{line}'") from None
        problem = _edge_problem(n, u, v, p, seen)
        if problem:
            raise GraphFormatError(lineno, problem)
        seen.add((u, v))
        edges.append(Edge(u, v, p))

    if n is None:
        raise GraphFormatError(1, "missing node count")
    log.debug(f"[Graph] Parsed n={n} m={len(edges)}")
    return InfluenceGraph(n, tuple(edges))


def format_graph(g: InfluenceGraph) -> str:
    """Inverse of parse_graph; repr() keeps probabilities bit-exact."""
    lines = [str(g.n)] + [f"{u} {v} {p!r}" for u, v, p in g.edges]
    return "\n".join(lines) + "\n"


def load_graph(path: str) -> InfluenceGraph:
    with open(path, "r", encoding="utf-8", newline=None) as f:
        return parse_graph(f)


# ----------------------------------------------------------------------
# Live-edge graphs
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class LiveEdgeGraph:
    """One realisation L: present[e] is True iff edge e of the parent is live."""
    parent: InfluenceGraph
    present: np.ndarray

    def __post_init__(self):
        present = np.asarray(self.present, dtype=bool)
        if present.shape != (self.parent.m,):
            raise ValueError(f"bitset length {present.shape} != edge count {self.parent.m}")
        object.__setattr__(self, "present", present)

    def __eq__(self, other):
        if not isinstance(other, LiveEdgeGraph):
            return NotImplemented
        return self.parent == other.parent and np.array_equal(self.present, other.present)

    def __hash__(self):
        return hash((self.parent, self.present.tobytes()))


def sample_live_edge(g: InfluenceGraph, rng: np.random.Generator) -> LiveEdgeGraph:
    """Each edge present independently with its probability."""
    return LiveEdgeGraph(g, rng.random(g.m) < g.probs)


def realized_reach(live: LiveEdgeGraph, seeds: Iterable[NodeId]) -> frozenset:
    """R_L(S): nodes with a live path from some seed (iterative BFS, seeds included)."""
    g = live.parent
    found = set(g.seed_set(seeds))
    queue = deque(found)
    while queue:
        u = queue.popleft()
        for idx in g.out_edges[u]:
            if live.present[idx]:
                w = g.edges[idx].target
                if w not in found:
                    found.add(w)
                    queue.append(w)
    return frozenset(found)


def realized_spread(live: LiveEdgeGraph, seeds: Iterable[NodeId]) -> int:
    return len(realized_reach(live, seeds))
