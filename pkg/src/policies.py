"""
Adaptive policies under myopic feedback and the greedy algorithms.

Policies are behavioural: `decide(psi)` returns the next seed or STOP. Exact
evaluation splits the enumerated live-edge graphs by what the policy observes,
so the policy is asked once per distinct partial realisation.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from src.diffusion import ExactEvaluator, SpreadEstimate, conditional_spread, exact_spread, sample_live_matrix
from src.enumeration import DEFAULT_CAP, expected_spread, outcome_matrix, spread_counts
from src.errors import InvalidSeedError, PolicyViolation
from src.graph import InfluenceGraph, LiveEdgeGraph, NodeId
from src.realisation import EMPTY, PartialRealisation, edge_probabilities, observation_outcomes

log = logging.getLogger(__name__)

STOP = None
TIE_TOL = 1e-12


# ----------------------------------------------------------------------
# Types
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class GreedyTrace:
    """Seeds in selection order and the value after each prefix S_1 .. S_k."""
    seeds: tuple[NodeId, ...]
    values: tuple[float, ...]

    @property
    def gains(self) -> list[float]:
        prev = [0.0] + list(self.values[:-1])
        return [v - p for v, p in zip(self.values, prev)]

    @property
    def value(self) -> float:
        return self.values[-1] if self.values else 0.0

    def to_dict(self) -> dict:
        return {"seeds": list(self.seeds), "values": list(self.values)}


@dataclass(frozen=True)
class SelectionProbabilities:
    """x[v] = probability that the policy selects v."""
    x: np.ndarray

    @property
    def total(self) -> float:
        return float(self.x.sum())

    def __getitem__(self, v: NodeId) -> float:
        return float(self.x[v])

    def to_list(self) -> list[float]:
        return [float(p) for p in self.x]


class AdaptivePolicy:
    """Base class: a decision rule psi -> next seed or STOP, with budget k."""

    def __init__(self, k: int):
        if k < 1:
            raise InvalidSeedError(f"budget k must be >= 1, got {k}")
        self.k = int(k)

    def decide(self, psi: PartialRealisation) -> NodeId | None:
        raise NotImplementedError

    def __call__(self, psi: PartialRealisation) -> NodeId | None:
        return self.decide(psi)


class ConstantPolicy(AdaptivePolicy):
    """Ignores feedback and seeds a fixed sequence."""

    def __init__(self, seeds: Sequence[NodeId]):
        super().__init__(len(seeds))
        self.seeds = tuple(int(v) for v in seeds)

    def decide(self, psi):
        for v in self.seeds:
            if v not in psi.dom:
                return v
        return STOP


class FunctionPolicy(AdaptivePolicy):
    """Wraps a plain callable; the callable returns a node and the budget supplies STOP."""

    def __init__(self, k: int, rule: Callable[[PartialRealisation], NodeId]):
        super().__init__(k)
        self.rule = rule

    def decide(self, psi):
        if len(psi) >= self.k:
            return STOP
        return self.rule(psi)


def _argmax(candidates: Iterable[NodeId], score: Callable[[NodeId], float]) -> tuple[NodeId | None, float]:
    """Highest score, ties (within TIE_TOL) broken by the smallest id."""
    best, best_val = None, -np.inf
    for v in sorted(candidates):
        val = score(v)
        if best is None or val > best_val + TIE_TOL:
            best, best_val = v, val
    return best, best_val


def _stream_key(g: InfluenceGraph, psi: PartialRealisation) -> tuple[int, ...]:
    flat = [len(psi)]
    for v, mask in psi.key(g):
        flat += [v, mask]
    return tuple(flat)


class AdaptiveGreedyPolicy(AdaptivePolicy):
    """pi^GR_k: picks the node with the largest conditional marginal gain."""

    def __init__(self, g: InfluenceGraph, k: int, evaluator=None):
        super().__init__(k)
        if k > g.n:
            raise InvalidSeedError(f"k={k} exceeds n={g.n}")
        self.g = g
        self.evaluator = evaluator or ExactEvaluator()
        self._memo: dict[PartialRealisation, NodeId | None] = {}

    def gains(self, psi: PartialRealisation) -> dict[NodeId, float]:
        g, ev = self.g, self.evaluator
        batch = ev.batch(g, 2, *_stream_key(g, psi))
        base = ev.conditional(g, psi, (), batch)
        return {v: ev.conditional(g, psi, {v}, batch) - base for v in g.nodes if v not in psi.dom}

    def decide(self, psi):
        if len(psi) >= self.k:
            return STOP
        if psi not in self._memo:
            gains = self.gains(psi)
            choice, gain = _argmax(gains, gains.__getitem__)
            log.debug(f"[AdaptiveGreedy] psi={psi.to_dict()} -> {choice} (gain {gain:.6f})")
            self._memo[psi] = choice
        return self._memo[psi]


# ----------------------------------------------------------------------
# Running policies
# ----------------------------------------------------------------------

def observe(live: LiveEdgeGraph, v: NodeId) -> frozenset:
    """phi_L(v): v plus its out-neighbours reached over live edges."""
    g = live.parent
    v = g.check_node(v)
    return frozenset([v] + [g.edges[i].target for i in g.out_edges[v] if live.present[i]])


def _checked_decision(pi: AdaptivePolicy, psi: PartialRealisation, n: int) -> NodeId | None:
    v = pi.decide(psi)
    if v is STOP:
        if len(psi) != pi.k:
            raise PolicyViolation(f"policy stopped after {len(psi)} seeds, budget is {pi.k}")
        return STOP
    if len(psi) >= pi.k:
        raise PolicyViolation(f"policy exceeded its budget k={pi.k}")
    if not (0 <= v < n):
        raise PolicyViolation(f"policy returned invalid node {v}")
    if v in psi.dom:
        raise PolicyViolation(f"policy repeated seed {v}")
    return int(v)


def run_policy(pi: AdaptivePolicy, live: LiveEdgeGraph) -> PartialRealisation:
    """Runs pi against one live-edge graph until STOP."""
    g = live.parent
    if pi.k > g.n:
        raise PolicyViolation(f"budget k={pi.k} exceeds n={g.n}")
    psi = EMPTY
    while True:
        v = _checked_decision(pi, psi, g.n)
        if v is STOP:
            return psi
        psi = psi.extend(v, observe(live, v))


def _split_by_policy(g: InfluenceGraph, pi: AdaptivePolicy, live: np.ndarray
                     ) -> Iterator[tuple[np.ndarray, PartialRealisation]]:
    """Groups the rows of `live` by the final partial realisation the policy reaches on them."""
    if pi.k > g.n:
        raise PolicyViolation(f"budget k={pi.k} exceeds n={g.n}")
    stack = [(np.arange(live.shape[0]), EMPTY)]
    while stack:
        rows, psi = stack.pop()
        v = _checked_decision(pi, psi, g.n)
        if v is STOP:
            yield rows, psi
            continue
        cols = g.out_edges[v]
        masks = np.zeros(len(rows), dtype=np.int64)
        for bit, idx in enumerate(cols):
            masks |= live[rows, idx].astype(np.int64) << bit
        for mask in np.unique(masks):
            observed = {v} | {g.edges[idx].target for bit, idx in enumerate(cols) if mask >> bit & 1}
            stack.append((rows[masks == mask], psi.extend(v, observed)))


def evaluate_policy(g: InfluenceGraph, pi: AdaptivePolicy, evaluator=None) -> float:
    """
    sigma(pi) = E_L[ sigma_L(dom(Psi_pi)) ].
    Exact evaluators enumerate every live-edge graph; Monte Carlo evaluators sample them.
    """
    evaluator = evaluator or ExactEvaluator()
    if evaluator.mode == "mc":
        return estimate_policy(g, pi, evaluator.samples, evaluator.seed).mean
    live, weight = outcome_matrix(g.probs, evaluator.cap)
    total = 0.0
    for rows, psi in _split_by_policy(g, pi, live):
        total += float(np.dot(weight[rows], spread_counts(g, live[rows], sorted(psi.dom))))
    return total


def estimate_policy(g: InfluenceGraph, pi: AdaptivePolicy, samples: int, seed: int) -> SpreadEstimate:
    """Monte Carlo sigma(pi) over `samples` sampled live-edge graphs."""
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    live = sample_live_matrix(g, samples, seed, stream=(3,))
    counts = np.zeros(samples)
    for rows, psi in _split_by_policy(g, pi, live):
        counts[rows] = spread_counts(g, live[rows], sorted(psi.dom))
    return SpreadEstimate.from_counts(counts)


def policy_leaves(g: InfluenceGraph, pi: AdaptivePolicy, depth: int | None = None
                  ) -> list[tuple[PartialRealisation, float]]:
    """
    Distribution of Psi_pi over positive-probability observation branches.
    With `depth`, stops after that many seeds (the policy's prefixes).
    """
    limit = pi.k if depth is None else min(depth, pi.k)
    out = []
    stack = [(EMPTY, 1.0)]
    while stack:
        psi, prob = stack.pop()
        if len(psi) >= limit:
            if len(psi) == pi.k:
                _checked_decision(pi, psi, g.n)
            out.append((psi, prob))
            continue
        v = _checked_decision(pi, psi, g.n)
        for observed, p in observation_outcomes(g, v, positive_only=True):
            stack.append((psi.extend(v, observed), prob * p))
    out.sort(key=lambda item: item[0].key(g))
    return out


def reachable_realisations(g: InfluenceGraph, pi: AdaptivePolicy) -> list[PartialRealisation]:
    """Every positive-probability psi the policy observes before its last pick (|psi| <= k-1)."""
    seen: list[PartialRealisation] = []
    for depth in range(pi.k):
        seen.extend(psi for psi, _ in policy_leaves(g, pi, depth))
    return list(dict.fromkeys(seen))


def selection_probabilities(g: InfluenceGraph, pi: AdaptivePolicy) -> SelectionProbabilities:
    x = np.zeros(g.n)
    for psi, prob in policy_leaves(g, pi):
        for v in psi.dom:
            x[v] += prob
    return SelectionProbabilities(x)


# ----------------------------------------------------------------------
# Greedy algorithms
# ----------------------------------------------------------------------

def nonadaptive_greedy(g: InfluenceGraph, k: int, evaluator=None) -> GreedyTrace:
    """Adds, k times, the node maximising the expected spread of the current set plus that node."""
    if not (1 <= k <= g.n):
        raise InvalidSeedError(f"k={k} must lie in [1, {g.n}]")
    evaluator = evaluator or ExactEvaluator()
    chosen: list[NodeId] = []
    values: list[float] = []
    for t in range(k):
        batch = evaluator.batch(g, 1, t)
        current = frozenset(chosen)
        v, val = _argmax((u for u in g.nodes if u not in current),
                         lambda u: evaluator.spread(g, current | {u}, batch))
        chosen.append(v)
        values.append(val)
        log.info(f"[Greedy] step {t + 1}/{k}: seed {v} -> {val:.6f}")
    return GreedyTrace(tuple(chosen), tuple(values))


def adaptive_greedy(g: InfluenceGraph, k: int, evaluator=None) -> AdaptiveGreedyPolicy:
    return AdaptiveGreedyPolicy(g, k, evaluator)


def adaptive_greedy_trace(g: InfluenceGraph, k: int, cap: int = DEFAULT_CAP) -> list[float]:
    """GR_A(G, t) for t = 1..k: expected spread after the policy's first t seeds."""
    pi = AdaptiveGreedyPolicy(g, k, ExactEvaluator(cap))
    return [sum(prob * conditional_spread(g, psi, (), cap) for psi, prob in policy_leaves(g, pi, t))
            for t in range(1, k + 1)]


# ----------------------------------------------------------------------
# Analysis devices: Rand_t and the hybrid policies
# ----------------------------------------------------------------------

def rand_t_value(g: InfluenceGraph, base: Iterable[NodeId], x: SelectionProbabilities, k: int,
                 cap: int = DEFAULT_CAP) -> float:
    """E_rho[ sigma(base + rho) ] with P[rho = i] = x_i / k."""
    if abs(x.total - k) > 1e-9:
        raise ValueError(f"selection probabilities sum to {x.total}, expected {k}")
    base = g.seed_set(base)
    return sum((x[i] / k) * exact_spread(g, base | {i}, cap) for i in g.nodes if x[i] > 0.0)


def hybrid_two_level_value(g: InfluenceGraph, base: Iterable[NodeId], pi: AdaptivePolicy,
                           cap: int = DEFAULT_CAP) -> float:
    """
    Hyb^2 value: pi runs on the feedback of L-hat alone; every node of
    dom(Psi-hat) + base then spreads in the 2-level live-edge graph.
    """
    base = g.seed_set(base)
    total = 0.0
    for psi_hat, prob in policy_leaves(g, pi):
        probs = edge_probabilities(g, boosted=base - psi_hat.dom, shadow_fixed=psi_hat.fixed_edges(g))
        total += prob * expected_spread(g, psi_hat.dom | base, probs, cap)
    return total


def strong_hybrid_value(g: InfluenceGraph, psi: PartialRealisation, pi: AdaptivePolicy,
                        cap: int = DEFAULT_CAP) -> float:
    """
    Hyb^2_psi value: conditioned on psi, only the nodes of dom(Psi-hat) - dom(psi)
    get a second chance (whose outcome is what pi observed on L-hat).
    """
    fixed = psi.fixed_edges(g)
    total = 0.0
    for psi_hat, prob in policy_leaves(g, pi):
        fresh = psi_hat.dom - psi.dom
        shadow = {idx: on for idx, on in psi_hat.fixed_edges(g).items() if g.edges[idx].source in fresh}
        probs = edge_probabilities(g, fixed=fixed, shadow_fixed=shadow)
        total += prob * expected_spread(g, psi.dom | psi_hat.dom, probs, cap)
    return total
