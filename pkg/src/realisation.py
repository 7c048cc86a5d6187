"""
Myopic feedback: partial realisations and the observation outcomes of a seed.

A partial realisation psi maps each chosen seed v to the set psi(v) holding v
and the out-neighbours v activated through its own edges. Observations of
distinct seeds concern disjoint edge sets, so psi is an unordered map and is
stored in a canonical sorted form.
"""

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Iterator, Mapping

import numpy as np

from src.errors import InconsistentRealisation
from src.graph import InfluenceGraph, NodeId


@dataclass(frozen=True)
class PartialRealisation:
    entries: tuple[tuple[NodeId, frozenset], ...] = field(default_factory=tuple)

    def __post_init__(self):
        canon = []
        for v, observed in self.entries:
            observed = frozenset(int(z) for z in observed)
            if v not in observed:
                raise InconsistentRealisation(f"observation of seed {v} must contain the seed itself")
            canon.append((int(v), observed))
        canon.sort(key=lambda item: item[0])
        if len({v for v, _ in canon}) != len(canon):
            raise InconsistentRealisation("a seed appears twice in the partial realisation")
        object.__setattr__(self, "entries", tuple(canon))

    @classmethod
    def from_mapping(cls, mapping: Mapping[NodeId, Iterable[NodeId]]) -> "PartialRealisation":
        return cls(tuple((v, frozenset(obs)) for v, obs in mapping.items()))

    # --- views -----------------------------------------------------------

    @property
    def dom(self) -> frozenset:
        return frozenset(v for v, _ in self.entries)

    @property
    def image(self) -> frozenset:
        out: set = set()
        for _, observed in self.entries:
            out |= observed
        return frozenset(out)

    def __getitem__(self, v: NodeId) -> frozenset:
        for seed, observed in self.entries:
            if seed == v:
                return observed
        raise KeyError(v)

    def __contains__(self, v) -> bool:
        return any(seed == v for seed, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    # --- construction ------------------------------------------------------

    def extend(self, v: NodeId, observed: Iterable[NodeId]) -> "PartialRealisation":
        if v in self:
            raise InconsistentRealisation(f"seed {v} already observed")
        return PartialRealisation(self.entries + ((v, frozenset(observed)),))

    def restrict(self, seeds: Iterable[NodeId]) -> "PartialRealisation":
        keep = set(seeds)
        return PartialRealisation(tuple(e for e in self.entries if e[0] in keep))

    def is_subrealisation_of(self, other: "PartialRealisation") -> bool:
        return all(v in other and other[v] == observed for v, observed in self.entries)

    # --- graph-dependent ---------------------------------------------------

    def validate(self, g: InfluenceGraph) -> "PartialRealisation":
        for v, observed in self.entries:
            if not (0 <= v < g.n):
                raise InconsistentRealisation(f"seed {v} outside [0, {g.n})")
            extra = observed - {v} - set(g.out_neighbors(v))
            if extra:
                raise InconsistentRealisation(f"seed {v} observed non-out-neighbours {sorted(extra)}")
        return self

    def fixed_edges(self, g: InfluenceGraph) -> dict[int, bool]:
        """Edge index -> observed liveness, for every edge leaving dom(psi)."""
        self.validate(g)
        fixed: dict[int, bool] = {}
        for v, observed in self.entries:
            for idx in g.out_edges[v]:
                fixed[idx] = g.edges[idx].target in observed
        return fixed

    def probability(self, g: InfluenceGraph) -> float:
        """P[psi is a sub-realisation of Phi]."""
        prob = 1.0
        for idx, on in self.fixed_edges(g).items():
            p = g.edges[idx].prob
            prob *= p if on else 1.0 - p
        return prob

    def key(self, g: InfluenceGraph) -> tuple[tuple[int, int], ...]:
        """Canonical (seed, observation bitmask over the seed's out-edges) pairs."""
        out = []
        for v, observed in self.entries:
            mask = 0
            for bit, w in enumerate(g.out_neighbors(v)):
                if w in observed:
                    mask |= 1 << bit
            out.append((v, mask))
        return tuple(out)

    def to_dict(self) -> dict[str, list[int]]:
        return {str(v): sorted(observed) for v, observed in self.entries}


EMPTY = PartialRealisation()


def observation_outcomes(g: InfluenceGraph, v: NodeId, positive_only: bool = False
                         ) -> list[tuple[frozenset, float]]:
    """
    Every outcome of observing seed v, in bitmask order over v's out-edges
    (bit i <-> i-th out-neighbour by id), with its probability.
    """
    nbrs = g.out_neighbors(v)
    probs = [g.edges[i].prob for i in g.out_edges[v]]
    outcomes = []
    for mask in range(1 << len(nbrs)):
        prob = 1.0
        observed = {v}
        for bit, (w, p) in enumerate(zip(nbrs, probs)):
            if mask >> bit & 1:
                observed.add(w)
                prob *= p
            else:
                prob *= 1.0 - p
        if positive_only and prob <= 0.0:
            continue
        outcomes.append((frozenset(observed), prob))
    return outcomes


def all_partial_realisations(g: InfluenceGraph, max_size: int | None = None,
                             positive_only: bool = True) -> Iterator[PartialRealisation]:
    """Every partial realisation with |dom| <= max_size (positive probability by default)."""
    top = g.n if max_size is None else min(max_size, g.n)
    per_node = [observation_outcomes(g, v, positive_only) for v in g.nodes]
    for size in range(top + 1):
        for dom in combinations(g.nodes, size):
            for choice in product(*(per_node[v] for v in dom)):
                yield PartialRealisation(tuple((v, obs) for v, (obs, _) in zip(dom, choice)))


def nested_pairs(realisations: list[PartialRealisation]) -> Iterator[tuple[PartialRealisation, PartialRealisation]]:
    """(psi, psi') with psi a sub-realisation of psi'."""
    for outer in realisations:
        for size in range(len(outer) + 1):
            for sub in combinations(outer.entries, size):
                yield PartialRealisation(sub), outer


def edge_probabilities(g: InfluenceGraph, fixed: Mapping[int, bool] | None = None,
                       boosted: Iterable[NodeId] = (), shadow_fixed: Mapping[int, bool] | None = None
                       ) -> np.ndarray:
    """
    Per-edge live probability for one evaluation:
      fixed        : L bits already observed (1.0 / 0.0)
      boosted      : sources whose edges get a second, unobserved chance -> 1-(1-p)^2
      shadow_fixed : second-chance bits already observed (live -> 1.0, dead -> p)
    'fixed' wins over the other two.
    """
    probs = g.probs.copy()
    for v in set(boosted):
        for idx in g.out_edges[v]:
            probs[idx] = 1.0 - (1.0 - probs[idx]) ** 2
    for idx, on in (shadow_fixed or {}).items():
        probs[idx] = 1.0 if on else g.edges[idx].prob
    for idx, on in (fixed or {}).items():
        probs[idx] = 1.0 if on else 0.0
    return probs
