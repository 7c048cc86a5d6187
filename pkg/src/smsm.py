"""
Stochastic monotone submodular maximisation (SMSM) under a cardinality budget.

Each item i has an independent discrete state distribution; selecting i
reveals its state. The objective f maps the vector of revealed states
(0 for unselected items) to a value and is monotone and lattice submodular.
"""

import json
import logging
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from src.enumeration import DEFAULT_CAP
from src.errors import EnumerationTooLarge, InvalidInstance, ItemAlreadySelected
from src.oracle import OracleResult
from src.policies import TIE_TOL, GreedyTrace

log = logging.getLogger(__name__)

PROB_TOL = 1e-12


# ----------------------------------------------------------------------
# Objectives
# ----------------------------------------------------------------------

class Objective:
    kind = "abstract"

    def __call__(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


class Modular(Objective):
    """f(x) = sum_i w_i x_i"""
    kind = "modular"

    def __init__(self, weights: Sequence[float]):
        self.weights = np.asarray(weights, dtype=np.float64)
        if (self.weights < 0).any():
            raise InvalidInstance("modular weights must be non-negative")

    def __call__(self, x):
        return float(np.dot(self.weights, x))

    def to_json(self):
        return {"kind": self.kind, "weights": self.weights.tolist()}


class CappedSum(Objective):
    """f(x) = min(cap, sum_i w_i x_i)"""
    kind = "capped_sum"

    def __init__(self, weights: Sequence[float], cap: float):
        self.weights = np.asarray(weights, dtype=np.float64)
        self.cap = float(cap)
        if (self.weights < 0).any() or self.cap < 0:
            raise InvalidInstance("capped-sum weights and cap must be non-negative")

    def __call__(self, x):
        return float(min(self.cap, np.dot(self.weights, x)))

    def to_json(self):
        return {"kind": self.kind, "weights": self.weights.tolist(), "cap": self.cap}


class Coverage(Objective):
    """
    Weighted max-coverage: element j is covered to max_i a[i, j] * x_i,
    f(x) = sum_j min(caps[j], coverage_j).
    """
    kind = "coverage"

    def __init__(self, a: Sequence[Sequence[float]], caps: Sequence[float]):
        self.a = np.asarray(a, dtype=np.float64)
        self.caps = np.asarray(caps, dtype=np.float64)
        if self.a.ndim != 2 or self.a.shape[1] != len(self.caps):
            raise InvalidInstance(f"coverage matrix shape {self.a.shape} does not match {len(self.caps)} caps")
        if (self.a < 0).any() or (self.caps < 0).any():
            raise InvalidInstance("coverage weights and caps must be non-negative")

    def __call__(self, x):
        if len(x) == 0:
            return 0.0
        cover = (self.a * np.asarray(x)[:, None]).max(axis=0)
        return float(np.minimum(self.caps, cover).sum())

    def to_json(self):
        return {"kind": self.kind, "a": self.a.tolist(), "caps": self.caps.tolist()}


def objective_from_json(doc: dict) -> Objective:
    kind = doc.get("kind")
    try:
        if kind == "modular":
            return Modular(doc["weights"])
        if kind == "capped_sum":
            return CappedSum(doc["weights"], doc["cap"])
        if kind == "coverage":
            return Coverage(doc["a"], doc["caps"])
    except KeyError as e:
        raise InvalidInstance(f"objective '{kind}' is missing {e}") from None
    raise InvalidInstance(f"unknown objective kind '{kind}'")


# ----------------------------------------------------------------------
# Instances and partial states
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class SmsmInstance:
    n: int
    k: int
    items: tuple[tuple[tuple[float, float], ...], ...]
    objective: Objective = field(compare=False)

    def __post_init__(self):
        items = tuple(tuple((float(v), float(p)) for v, p in dist) for dist in self.items)
        object.__setattr__(self, "items", items)
        if len(items) != self.n:
            raise InvalidInstance(f"{len(items)} item distributions for n={self.n}")
        if not (1 <= self.k <= self.n):
            raise InvalidInstance(f"k={self.k} must lie in [1, {self.n}]")
        for i, dist in enumerate(items):
            if not dist:
                raise InvalidInstance(f"item {i} has an empty distribution")
            if any(v < 0 or p < 0 for v, p in dist):
                raise InvalidInstance(f"item {i} has a negative state or probability")
            if abs(sum(p for _, p in dist) - 1.0) > PROB_TOL:
                raise InvalidInstance(f"item {i} probabilities sum to {sum(p for _, p in dist)}")

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "objective": self.objective.to_json(),
                "items": [[{"value": v, "prob": p} for v, p in dist] for dist in self.items]}


@dataclass(frozen=True)
class PartialState:
    """theta(S): values[i] is the revealed state of i for i in support, 0 elsewhere."""
    values: tuple[float, ...]
    support: frozenset = frozenset()

    def __post_init__(self):
        if any(self.values[i] != 0.0 for i in range(len(self.values)) if i not in self.support):
            raise InvalidInstance("partial state is non-zero outside its support")

    @classmethod
    def empty(cls, n: int) -> "PartialState":
        return cls((0.0,) * n)

    def with_item(self, i: int, value: float) -> "PartialState":
        if i in self.support:
            raise ItemAlreadySelected(f"item {i} already selected")
        values = list(self.values)
        values[i] = float(value)
        return PartialState(tuple(values), self.support | {i})

    def join(self, other: "PartialState") -> "PartialState":
        """Component-wise max (lattice join)."""
        return PartialState(tuple(max(a, b) for a, b in zip(self.values, other.values)),
                            self.support | other.support)

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.values, dtype=np.float64)


def load_smsm_instance(path: str) -> SmsmInstance:
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise InvalidInstance(f"{path}: {e}") from None
    return smsm_from_json(doc)


def smsm_from_json(doc: dict) -> SmsmInstance:
    try:
        items = tuple(tuple((s["value"], s["prob"]) for s in dist) for dist in doc["items"])
        return SmsmInstance(int(doc["n"]), int(doc["k"]), items, objective_from_json(doc["objective"]))
    except (KeyError, TypeError) as e:
        raise InvalidInstance(f"malformed SMSM instance: {e}") from None


# ----------------------------------------------------------------------
# Expectations
# ----------------------------------------------------------------------

def joint_states(inst: SmsmInstance, items: Iterable[int], cap: int = DEFAULT_CAP,
                 base: PartialState | None = None):
    """(theta(items) joined onto base, probability) for every joint state of the items."""
    items = sorted(set(items))
    total = 1
    for i in items:
        total *= len(inst.items[i])
    if total > 1 << cap:
        raise EnumerationTooLarge(total, 1 << cap, "joint states")
    base = base or PartialState.empty(inst.n)
    for combo in product(*(inst.items[i] for i in items)):
        values = [0.0] * inst.n
        prob = 1.0
        for i, (v, p) in zip(items, combo):
            values[i] = v
            prob *= p
        yield base.join(PartialState(tuple(values), frozenset(items))), prob


def smsm_expected_value(inst: SmsmInstance, S: Iterable[int], cap: int = DEFAULT_CAP) -> float:
    """E_theta[ f(theta(S)) ]."""
    S = set(S)
    if any(not (0 <= i < inst.n) for i in S):
        raise InvalidInstance(f"items {sorted(S)} outside [0, {inst.n})")
    f = inst.objective
    return sum(p * f(xi.vector) for xi, p in joint_states(inst, S, cap) if p > 0.0)


def smsm_marginal(inst: SmsmInstance, xi: PartialState, i: int) -> float:
    """Delta(i | xi) = E_{e^i}[ f(xi v e^i) - f(xi) ]."""
    if i in xi.support:
        raise ItemAlreadySelected(f"item {i} is already in the support")
    f = inst.objective
    here = f(xi.vector)
    total = 0.0
    for v, p in inst.items[i]:
        x = xi.vector
        x[i] = max(x[i], v)
        total += p * (f(x) - here)
    return total


def smsm_greedy(inst: SmsmInstance, cap: int = DEFAULT_CAP) -> GreedyTrace:
    chosen: list[int] = []
    values: list[float] = []
    for t in range(inst.k):
        best, best_val = None, -np.inf
        for i in range(inst.n):
            if i in chosen:
                continue
            val = smsm_expected_value(inst, chosen + [i], cap)
            if best is None or val > best_val + TIE_TOL:
                best, best_val = i, val
        chosen.append(best)
        values.append(best_val)
        log.debug(f"[SMSM] greedy step {t + 1}: item {best} -> {best_val:.6f}")
    return GreedyTrace(tuple(chosen), tuple(values))


def smsm_opt_nonadaptive(inst: SmsmInstance, cap: int = DEFAULT_CAP) -> OracleResult:
    best, best_val = None, -1.0
    for S in combinations(range(inst.n), inst.k):
        val = smsm_expected_value(inst, S, cap)
        if best is None or val > best_val + TIE_TOL:
            best, best_val = frozenset(S), val
    return OracleResult(best_val, best)


# ----------------------------------------------------------------------
# Adaptive optimum
# ----------------------------------------------------------------------

@dataclass
class SmsmNode:
    pick: int
    # (revealed state value, probability, child or None at depth k)
    branches: list[tuple[float, float, "SmsmNode | None"]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"pick": self.pick,
                "branches": [{"value": v, "prob": p, "child": None if c is None else c.to_json()}
                             for v, p, c in self.branches]}


@dataclass
class SmsmTree:
    k: int
    root: SmsmNode

    def to_json(self) -> dict:
        return {"k": self.k, "root": self.root.to_json()}

    def leaves(self, n: int) -> list[tuple[PartialState, float]]:
        """(theta-hat(U), probability) at every leaf."""
        out = []

        def walk(node, xi, prob):
            for v, p, child in node.branches:
                nxt = xi.with_item(node.pick, v)
                if child is None:
                    out.append((nxt, prob * p))
                else:
                    walk(child, nxt, prob * p)

        walk(self.root, PartialState.empty(n), 1.0)
        return out

    def selection_probabilities(self, n: int) -> np.ndarray:
        x = np.zeros(n)
        for xi, prob in self.leaves(n):
            for i in xi.support:
                x[i] += prob
        return x


def _state_budget(inst: SmsmInstance) -> int:
    # states with |support| <= k: elementary symmetric sums of the support sizes
    e = [1] + [0] * inst.k
    for dist in inst.items:
        for j in range(inst.k, 0, -1):
            e[j] += e[j - 1] * len(dist)
    return sum(e)


def smsm_opt_adaptive(inst: SmsmInstance, max_states: int = 200_000) -> OracleResult:
    """Backward induction over (selected set, revealed states); the witness is an SmsmTree."""
    states = _state_budget(inst)
    if states > max_states:
        raise EnumerationTooLarge(states, max_states, "SMSM states")
    f = inst.objective
    values: dict[PartialState, float] = {}
    choice: dict[PartialState, int] = {}

    def solve(xi: PartialState) -> float:
        if xi in values:
            return values[xi]
        if len(xi.support) == inst.k:
            val = f(xi.vector)
        else:
            best, val = None, -1.0
            for i in range(inst.n):
                if i in xi.support:
                    continue
                total = sum(p * solve(xi.with_item(i, v)) for v, p in inst.items[i])
                if best is None or total > val + TIE_TOL:
                    best, val = i, total
            choice[xi] = best
        values[xi] = val
        return val

    def build(xi: PartialState) -> SmsmNode:
        i = choice[xi]
        branches = []
        for v, p in inst.items[i]:
            nxt = xi.with_item(i, v)
            branches.append((v, p, None if len(nxt.support) == inst.k else build(nxt)))
        return SmsmNode(i, branches)

    root = PartialState.empty(inst.n)
    value = solve(root)
    log.debug(f"[SMSM] OPT_A={value:.6f} states={len(values)}")
    return OracleResult(value, SmsmTree(inst.k, build(root)), len(values))


# ----------------------------------------------------------------------
# Analysis devices
# ----------------------------------------------------------------------

def smsm_rand_value(inst: SmsmInstance, S: Iterable[int], x: np.ndarray, cap: int = DEFAULT_CAP) -> float:
    """E_{theta, rho}[ f(theta(S + rho)) ], P[rho = i] = x_i / k."""
    S = set(S)
    return sum((x[i] / inst.k) * smsm_expected_value(inst, S | {i}, cap) for i in range(inst.n) if x[i] > 0.0)


def smsm_expected_marginal(inst: SmsmInstance, S: Iterable[int], i: int, cap: int = DEFAULT_CAP) -> float:
    """E_theta[ Delta(i | theta(S)) ]."""
    return sum(p * smsm_marginal(inst, xi, i) for xi, p in joint_states(inst, S, cap) if p > 0.0)


def smsm_hybrid_value(inst: SmsmInstance, S: Iterable[int], tree: SmsmTree, cap: int = DEFAULT_CAP) -> float:
    """E_{theta, theta-hat}[ f(theta(S) v theta-hat(U + S)) ] with U the policy's picks on theta-hat."""
    S = set(S)
    f = inst.objective
    total = 0.0
    for hat_u, p_leaf in tree.leaves(inst.n):
        if p_leaf <= 0.0:
            continue
        for hat, p_hat in joint_states(inst, S - hat_u.support, cap, base=hat_u):
            if p_hat <= 0.0:
                continue
            for xi, p in joint_states(inst, S, cap, base=hat):
                total += p_leaf * p_hat * p * f(xi.vector)
    return total


def smsm_double_value(inst: SmsmInstance, S: Iterable[int], cap: int = DEFAULT_CAP) -> float:
    """E_{theta, theta-hat}[ f(theta(S) v theta-hat(S)) ]."""
    S = set(S)
    f = inst.objective
    total = 0.0
    for hat, p_hat in joint_states(inst, S, cap):
        for xi, p in joint_states(inst, S, cap, base=hat):
            total += p_hat * p * f(xi.vector)
    return total
