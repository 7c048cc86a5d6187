"""
Exact oracles: OPT_N by exhaustive search over seed sets, OPT_A by backward
induction over partial realisations, and the adaptivity gap.
"""

import json
import logging
from dataclasses import dataclass, field
from itertools import combinations
from math import factorial
from typing import Iterable

from src.diffusion import conditional_spread, exact_spread
from src.enumeration import DEFAULT_CAP, free_edge_count
from src.errors import EnumerationTooLarge, InvalidSeedError, MalformedTree
from src.graph import InfluenceGraph, NodeId
from src.policies import STOP, TIE_TOL, AdaptivePolicy
from src.realisation import EMPTY, PartialRealisation, observation_outcomes

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleLimits:
    """Resource guard for the exact oracles; checked before any enumeration starts."""
    max_nodes: int = 6
    max_out_degree: int = 3
    max_k: int = 4
    max_states: int = 200_000
    nonadaptive_max_nodes: int = 8
    nonadaptive_max_edges: int = 16


DEFAULT_LIMITS = OracleLimits()


@dataclass
class DecisionNode:
    pick: NodeId
    # (observed out-neighbours excluding the seed, child or None at depth k)
    branches: list[tuple[frozenset, "DecisionNode | None"]] = field(default_factory=list)


@dataclass
class DecisionTree:
    k: int
    root: DecisionNode

    def to_json(self) -> dict:
        def enc(node):
            if node is None:
                return None
            return {"pick": node.pick,
                    "branches": [{"observed": sorted(obs), "child": enc(child)} for obs, child in node.branches]}
        return {"k": self.k, "root": enc(self.root)}

    @classmethod
    def from_json(cls, doc: dict) -> "DecisionTree":
        def dec(node):
            if node is None:
                return None
            try:
                return DecisionNode(int(node["pick"]),
                                    [(frozenset(int(z) for z in b["observed"]), dec(b["child"]))
                                     for b in node["branches"]])
            except (KeyError, TypeError, ValueError) as e:
                raise MalformedTree(f"bad tree node: {e}") from None
        try:
            return cls(int(doc["k"]), dec(doc["root"]))
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedTree(f"bad tree document: {e}") from None

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


@dataclass(frozen=True)
class OracleResult:
    value: float
    witness: frozenset | DecisionTree
    states: int = 0


@dataclass(frozen=True)
class GapReport:
    k: int
    opt_n: float
    opt_a: float
    gap: float
    nonadaptive: OracleResult | None = None
    adaptive: OracleResult | None = None

    def to_dict(self) -> dict:
        return {"k": self.k, "opt_n": self.opt_n, "opt_a": self.opt_a, "gap": self.gap}


# ----------------------------------------------------------------------
# OPT_N
# ----------------------------------------------------------------------

def opt_nonadaptive(g: InfluenceGraph, k: int, limits: OracleLimits = DEFAULT_LIMITS,
                    cap: int = DEFAULT_CAP) -> OracleResult:
    """Best size-k seed set; the lexicographically smallest maximiser wins ties."""
    if not (1 <= k <= g.n):
        raise InvalidSeedError(f"k={k} must lie in [1, {g.n}]")
    if g.n > limits.nonadaptive_max_nodes:
        raise EnumerationTooLarge(g.n, limits.nonadaptive_max_nodes, "nodes")
    free = free_edge_count(g.probs)
    if free > limits.nonadaptive_max_edges:
        raise EnumerationTooLarge(free, limits.nonadaptive_max_edges, "free edges")

    best_set, best_val = None, -1.0
    for seeds in combinations(g.nodes, k):
        val = exact_spread(g, seeds, cap)
        if best_set is None or val > best_val + TIE_TOL:
            best_set, best_val = frozenset(seeds), val
    log.debug(f"[Oracle] OPT_N(k={k})={best_val:.6f} witness={sorted(best_set)}")
    return OracleResult(best_val, best_set)


# ----------------------------------------------------------------------
# OPT_A
# ----------------------------------------------------------------------

def state_count(g: InfluenceGraph, k: int, canonical: bool = True) -> int:
    """Partial realisations with |dom| <= k (ordered histories when canonical=False)."""
    # elementary symmetric sums of the per-node outcome counts 2^outdeg
    e = [1] + [0] * k
    for v in g.nodes:
        w = 1 << len(g.out_edges[v])
        for j in range(k, 0, -1):
            e[j] += e[j - 1] * w
    return sum(e[j] * (1 if canonical else factorial(j)) for j in range(k + 1))


def _guard_adaptive(g: InfluenceGraph, k: int, limits: OracleLimits, canonical: bool) -> int:
    if not (1 <= k <= g.n):
        raise InvalidSeedError(f"k={k} must lie in [1, {g.n}]")
    if g.n > limits.max_nodes:
        raise EnumerationTooLarge(g.n, limits.max_nodes, "nodes")
    if k > limits.max_k:
        raise EnumerationTooLarge(k, limits.max_k, "budget")
    degree = max((len(out) for out in g.out_edges), default=0)
    if degree > limits.max_out_degree:
        raise EnumerationTooLarge(degree, limits.max_out_degree, "out-degree")
    states = state_count(g, k, canonical)
    if states > limits.max_states:
        raise EnumerationTooLarge(states, limits.max_states, "oracle states")
    return states


def opt_adaptive(g: InfluenceGraph, k: int, limits: OracleLimits = DEFAULT_LIMITS,
                 cap: int = DEFAULT_CAP, canonical: bool = True) -> OracleResult:
    """
    Backward induction:
        V(psi) = sigma(dom psi | psi)                                 if |dom psi| = k
        V(psi) = max_v  sum_O P[O] * V(psi + (v, O))                  otherwise
    Memo keys are canonical partial realisations; with canonical=False they are
    ordered histories (same values, more states).
    """
    budget = _guard_adaptive(g, k, limits, canonical)
    outcomes = [observation_outcomes(g, v) for v in g.nodes]
    values: dict = {}
    choice: dict = {}

    def solve(psi: PartialRealisation, history: tuple) -> float:
        key = psi if canonical else history
        if key in values:
            return values[key]
        if len(psi) == k:
            val = conditional_spread(g, psi, (), cap)
        else:
            best, val = None, -1.0
            for v in g.nodes:
                if v in psi.dom:
                    continue
                total = sum(p * solve(psi.extend(v, obs), history + ((v, obs),)) for obs, p in outcomes[v])
                if best is None or total > val + TIE_TOL:
                    best, val = v, total
            choice[key] = best
        values[key] = val
        return val

    value = solve(EMPTY, ())

    def build(psi: PartialRealisation, history: tuple) -> DecisionNode:
        v = choice[psi if canonical else history]
        branches = []
        for obs, _ in outcomes[v]:
            child_psi = psi.extend(v, obs)
            child = None if len(child_psi) == k else build(child_psi, history + ((v, obs),))
            branches.append((obs - {v}, child))
        return DecisionNode(v, branches)

    tree = DecisionTree(k, build(EMPTY, ()))
    log.debug(f"[Oracle] OPT_A(k={k})={value:.6f} states={len(values)}/{budget}")
    return OracleResult(value, tree, len(values))


def adaptivity_gap(g: InfluenceGraph, k: int, limits: OracleLimits = DEFAULT_LIMITS,
                   cap: int = DEFAULT_CAP) -> GapReport:
    non = opt_nonadaptive(g, k, limits, cap)
    ada = opt_adaptive(g, k, limits, cap)
    return GapReport(k, non.value, ada.value, ada.value / non.value, non, ada)


# ----------------------------------------------------------------------
# Decision trees
# ----------------------------------------------------------------------

def validate_tree(g: InfluenceGraph, tree: DecisionTree) -> DecisionTree:
    if tree.k < 1 or tree.k > g.n:
        raise MalformedTree(f"tree budget k={tree.k} invalid for n={g.n}")

    def walk(node: DecisionNode, used: frozenset, depth: int):
        if not (0 <= node.pick < g.n):
            raise MalformedTree(f"pick {node.pick} outside [0, {g.n})")
        if node.pick in used:
            raise MalformedTree(f"pick {node.pick} repeated along a path")
        nbrs = frozenset(g.out_neighbors(node.pick))
        observed = [obs for obs, _ in node.branches]
        if len(observed) != 1 << len(nbrs) or len(set(observed)) != len(observed):
            raise MalformedTree(f"node {node.pick} must branch on all {1 << len(nbrs)} outcomes")
        for obs, child in node.branches:
            if not obs <= nbrs:
                raise MalformedTree(f"node {node.pick} branch names non-neighbours {sorted(obs - nbrs)}")
            if (child is None) != (depth == tree.k):
                raise MalformedTree(f"path depth differs from k={tree.k}")
            if child is not None:
                walk(child, used | {node.pick}, depth + 1)

    walk(tree.root, frozenset(), 1)
    return tree


def evaluate_decision_tree(g: InfluenceGraph, tree: DecisionTree, cap: int = DEFAULT_CAP) -> float:
    """sigma of the tree-encoded policy, summed branch by branch."""
    validate_tree(g, tree)

    def value(node: DecisionNode | None, psi: PartialRealisation) -> float:
        if node is None:
            return conditional_spread(g, psi, (), cap)
        probs = {obs - {node.pick}: p for obs, p in observation_outcomes(g, node.pick)}
        return sum(probs[obs] * value(child, psi.extend(node.pick, obs | {node.pick}))
                   for obs, child in node.branches if probs[obs] > 0.0)

    return value(tree.root, EMPTY)


class TreePolicy(AdaptivePolicy):
    """Replays a materialised decision tree as a behavioural policy."""

    def __init__(self, tree: DecisionTree):
        super().__init__(tree.k)
        self.tree = tree

    def decide(self, psi):
        node = self.tree.root
        while node is not None and node.pick in psi.dom:
            seen = psi[node.pick] - {node.pick}
            node = next((child for obs, child in node.branches if obs == seen), STOP)
        return STOP if node is None else node.pick


def tree_seeds(tree: DecisionTree) -> list[frozenset]:
    """Seed sets along every root-leaf path."""
    out = []

    def walk(node, used):
        for _, child in node.branches:
            if child is None:
                out.append(used | {node.pick})
            else:
                walk(child, used | {node.pick})

    walk(tree.root, frozenset())
    return out


def load_tree(path: str) -> DecisionTree:
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise MalformedTree(f"{path}: {e}") from None
    return DecisionTree.from_json(doc)


def constant_tree(g: InfluenceGraph, seeds: Iterable[NodeId]) -> DecisionTree:
    """A tree that ignores every observation."""
    order = list(seeds)

    def build(i):
        v = order[i]
        return DecisionNode(v, [(obs - {v}, None if i == len(order) - 1 else build(i + 1))
                                for obs, _ in observation_outcomes(g, v)])

    return DecisionTree(len(order), build(0))
