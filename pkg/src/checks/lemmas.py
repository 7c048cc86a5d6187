"""
Exhaustive instance-level checks of the approximation analysis.

Every check walks an instance family, evaluates both sides of an inequality
exactly (no Monte Carlo) and records the comparison in a CheckReport. An
instance whose exact evaluation would exceed a resource guard is skipped and
counted.
"""

import logging
from dataclasses import dataclass, field
from functools import partial
from itertools import combinations
from typing import Callable, Iterable

from tqdm import tqdm

from src.bounds import (GLOBAL_GAP_CEILING, adaptive_greedy_threshold, gap_ceiling, greedy_threshold,
                        kempe_threshold)
from src.checks.report import CheckReport
from src.diffusion import (ExactEvaluator, adaptive_two_level_marginal, conditional_marginal, conditional_spread,
                           exact_spread, exact_two_level_spread, exact_two_level_spread_joint, marginal_gain,
                           strong_adaptive_marginal, strong_two_level_marginal, two_level_marginal)
from src.enumeration import DEFAULT_CAP
from src.errors import EnumerationTooLarge, UnknownCheck
from src.families import LabelledGraph
from src.graph import InfluenceGraph, format_graph
from src.oracle import (DEFAULT_LIMITS, GapReport, OracleLimits, TreePolicy, adaptivity_gap, constant_tree,
                        evaluate_decision_tree, opt_adaptive, opt_nonadaptive)
from src.policies import (AdaptiveGreedyPolicy, AdaptivePolicy, evaluate_policy, hybrid_two_level_value,
                          nonadaptive_greedy, rand_t_value, reachable_realisations, selection_probabilities,
                          strong_hybrid_value)
from src.realisation import EMPTY, all_partial_realisations, nested_pairs

log = logging.getLogger(__name__)

POLICIES = ("optimal", "greedy")


@dataclass
class CheckContext:
    """Options shared by every check in one verification run."""
    k: int = 2
    cap: int = DEFAULT_CAP
    limits: OracleLimits = DEFAULT_LIMITS
    policy: str = "optimal"
    max_realisation_size: int | None = None
    progress: bool = False


def _subsets(n: int) -> Iterable[frozenset]:
    for size in range(n + 1):
        for combo in combinations(range(n), size):
            yield frozenset(combo)


def _run(check_id: str, family: Iterable[LabelledGraph], ctx: CheckContext,
         body: Callable[[CheckReport, InfluenceGraph, str], None], needs_k: bool = False) -> CheckReport:
    report = CheckReport(check_id)
    for label, g in tqdm(family, desc=check_id, disable=not ctx.progress, leave=False):
        if needs_k and ctx.k > g.n:
            report.skipped += 1
            continue
        try:
            body(report, g, format_graph(g))
        except EnumerationTooLarge as e:
            report.skipped += 1
            log.debug(f"[Verify] {check_id}: skipped {label}: {e}")
            continue
        report.tested += 1
    if report.violations:
        log.warning(f"[Verify] {check_id}: {len(report.violations)} violations over {report.tested} instances")
    else:
        log.info(f"[Verify] {check_id}: ok ({report.tested} tested, {report.skipped} skipped)")
    return report


def _exact(ctx: CheckContext) -> ExactEvaluator:
    return ExactEvaluator(ctx.cap)


def _policy(g: InfluenceGraph, ctx: CheckContext) -> AdaptivePolicy:
    """The pi whose selection probabilities x feed the Rand / Hyb checks."""
    if ctx.policy == "optimal":
        return TreePolicy(opt_adaptive(g, ctx.k, ctx.limits, ctx.cap).witness)
    if ctx.policy == "greedy":
        return AdaptiveGreedyPolicy(g, ctx.k, _exact(ctx))
    raise ValueError(f"unknown policy '{ctx.policy}', expected one of {POLICIES}")


# ----------------------------------------------------------------------
# 2-level model vs ordinary model
# ----------------------------------------------------------------------

def check_two_level_upper(family, ctx: CheckContext = CheckContext()) -> CheckReport:
    """sigma^2(S) <= 2 sigma(S) for every S."""
    def body(report, g, text):
        for S in _subsets(g.n):
            report.record(text, {"S": sorted(S)}, exact_two_level_spread(g, S, ctx.cap),
                          2.0 * exact_spread(g, S, ctx.cap))
    return _run("two_level_upper", family, ctx, body)


def check_marginal_upper(family, ctx: CheckContext = CheckContext()) -> CheckReport:
    """Delta^2_S(v) <= 2 Delta_S(v) for every (S, v)."""
    def body(report, g, text):
        for S in _subsets(g.n):
            for v in g.nodes:
                report.record(text, {"S": sorted(S), "v": v}, two_level_marginal(g, S, v, ctx.cap),
                              2.0 * marginal_gain(g, S, v, ctx.cap))
    return _run("marginal_upper", family, ctx, body)


def check_strong_marginal_upper(family, ctx: CheckContext = CheckContext()) -> CheckReport:
    """Delta^2_psi(v) <= 2 Delta_psi(v) for every positive-probability psi and every v."""
    def body(report, g, text):
        for psi in all_partial_realisations(g, ctx.max_realisation_size):
            for v in g.nodes:
                report.record(text, {"psi": psi.to_dict(), "v": v}, strong_two_level_marginal(g, psi, v, ctx.cap),
                              2.0 * conditional_marginal(g, psi, v, ctx.cap))
    return _run("strong_marginal_upper", family, ctx, body)


def check_two_level_equivalence(family, ctx: CheckContext = CheckContext()) -> CheckReport:
    """Joint (L, L-hat) enumeration of sigma^2 equals the boosted-probability form."""
    def body(report, g, text):
        for S in _subsets(g.n):
            report.record_equal(text, {"S": sorted(S)}, exact_two_level_spread_joint(g, S, ctx.cap),
                                exact_two_level_spread(g, S, ctx.cap), tol=1e-12)
    return _run("two_level_equivalence", family, ctx, body)


# ----------------------------------------------------------------------
# Adaptive submodularity
# ----------------------------------------------------------------------

def check_adaptive_submodularity(family, ctx: CheckContext = CheckContext()) -> CheckReport:
    """Delta^2_S(v | psi') <= Delta^2_S(v | psi) whenever psi is a sub-realisation of psi'."""
    def body(report, g, text):
        realisations = list(all_partial_realisations(g, ctx.max_realisation_size))
        pairs = list(nested_pairs(realisations))
        for S in _subsets(g.n):
            memo: dict = {}

            def gain(psi_hat, v):
                if (psi_hat, v) not in memo:
                    memo[psi_hat, v] = adaptive_two_level_marginal(g, S, psi_hat, v, ctx.cap)
                return memo[psi_hat, v]

            for v in g.nodes:
                for inner, outer in pairs:
                    report.record(text, {"S": sorted(S), "v": v, "psi_hat": inner.to_dict(),
                                         "psi_hat_outer": outer.to_dict()},
                                  gain(outer, v), gain(inner, v))
    return _run("adaptive_submodularity", family, ctx, body)


def check_strong_adaptive_submodularity(family, ctx: CheckContext = CheckContext()) -> CheckReport:
    """Delta^2_psi(v | psi') <= Delta^2_psi(v | psi-hat) for psi-hat sub-realisation of psi', any psi."""
    def body(report, g, text):
        realisations = list(all_partial_realisations(g, ctx.max_realisation_size))
        pairs = list(nested_pairs(realisations))
        for psi in realisations:
            memo: dict = {}

            def gain(psi_hat, v):
                if (psi_hat, v) not in memo:
                    memo[psi_hat, v] = strong_adaptive_marginal(g, psi, psi_hat, v, ctx.cap)
                return memo[psi_hat, v]

            for v in g.nodes:
                if v in psi.dom:
                    continue
                for inner, outer in pairs:
                    report.record(text, {"psi": psi.to_dict(), "v": v, "psi_hat": inner.to_dict(),
                                         "psi_hat_outer": outer.to_dict()},
                                  gain(outer, v), gain(inner, v))
    return _run("strong_adaptive_submodularity", family, ctx, body)


# ----------------------------------------------------------------------
# Rand_t and the hybrid policies
# ----------------------------------------------------------------------

def check_rand_lower(family, ctx: CheckContext = CheckContext()) -> CheckReport:
    """
    k (E_rho[sigma(S + rho)] - sigma(S)) >= sum_{v not in S} x_v Delta_S(v).
    Also notes whether the two sides were equal on every comparison.
    """
    def body(report, g, text):
        x = selection_probabilities(g, _policy(g, ctx))
        for S in _subsets(g.n):
            lhs = ctx.k * (rand_t_value(g, S, x, ctx.k, ctx.cap) - exact_spread(g, S, ctx.cap))
            rhs = sum(x[v] * marginal_gain(g, S, v, ctx.cap) for v in g.nodes if v not in S)
            report.record(text, {"S": sorted(S), "k": ctx.k, "x": x.to_list()}, rhs, lhs)
            report.notes["equality_held"] = report.notes.get("equality_held", True) and abs(lhs - rhs) <= 1e-9
    return _run("rand_lower", family, ctx, body, needs_k=True)


def check_hybrid_bound(family, ctx: CheckContext = CheckContext(), strong: bool = False) -> CheckReport:
    """
    weak  : Hyb^2 value(S)   <= sigma^2(S) + sum_{v not in S} x_v Delta^2_S(v), every S
    strong: Hyb^2_psi value  <= sigma(dom psi | psi) + sum_{v not in dom psi} x_v Delta^2_psi(v),
            every psi reachable by the adaptive greedy policy's prefixes
    """
    def body(report, g, text):
        pi = _policy(g, ctx)
        x = selection_probabilities(g, pi)
        if not strong:
            for S in _subsets(g.n):
                rhs = exact_two_level_spread(g, S, ctx.cap) + sum(
                    x[v] * two_level_marginal(g, S, v, ctx.cap) for v in g.nodes if v not in S)
                report.record(text, {"S": sorted(S), "k": ctx.k}, hybrid_two_level_value(g, S, pi, ctx.cap), rhs)
            return
        for psi in reachable_realisations(g, AdaptiveGreedyPolicy(g, ctx.k, _exact(ctx))):
            rhs = conditional_spread(g, psi, (), ctx.cap) + sum(
                x[v] * strong_two_level_marginal(g, psi, v, ctx.cap) for v in g.nodes if v not in psi.dom)
            report.record(text, {"psi": psi.to_dict(), "k": ctx.k}, strong_hybrid_value(g, psi, pi, ctx.cap), rhs)
    return _run("hybrid_bound_strong" if strong else "hybrid_bound", family, ctx, body, needs_k=True)


def check_opt_bound(family, ctx: CheckContext = CheckContext(), strong: bool = False) -> CheckReport:
    """OPT_A <= Hyb^2 value for every S (weak) or every reachable psi (strong); pi is optimal."""
    def body(report, g, text):
        res = opt_adaptive(g, ctx.k, ctx.limits, ctx.cap)
        pi = TreePolicy(res.witness)
        if not strong:
            for S in _subsets(g.n):
                report.record(text, {"S": sorted(S), "k": ctx.k}, res.value,
                              hybrid_two_level_value(g, S, pi, ctx.cap))
            return
        for psi in reachable_realisations(g, AdaptiveGreedyPolicy(g, ctx.k, _exact(ctx))):
            report.record(text, {"psi": psi.to_dict(), "k": ctx.k}, res.value,
                          strong_hybrid_value(g, psi, pi, ctx.cap))
    return _run("opt_bound_strong" if strong else "opt_bound", family, ctx, body, needs_k=True)


# ----------------------------------------------------------------------
# End-to-end guarantees
# ----------------------------------------------------------------------

def check_theorem_ratios(family, ctx: CheckContext = CheckContext()) -> CheckReport:
    """
    GR_N >= 1/2 (1 - (1 - 1/k)^k) OPT_A and GR_A >= (1 - (1 - 1/(2k))^k) OPT_A.
    Notes keep the worst observed ratios.
    """
    def body(report, g, text):
        opt_a = opt_adaptive(g, ctx.k, ctx.limits, ctx.cap).value
        ev = _exact(ctx)
        gr_n = nonadaptive_greedy(g, ctx.k, ev).value
        gr_a = evaluate_policy(g, AdaptiveGreedyPolicy(g, ctx.k, ev), ev)
        report.record(text, {"k": ctx.k, "algorithm": "greedy"}, greedy_threshold(ctx.k) * opt_a, gr_n)
        report.record(text, {"k": ctx.k, "algorithm": "adaptive_greedy"},
                      adaptive_greedy_threshold(ctx.k) * opt_a, gr_a)
        report.note_extreme("worst_ratio_greedy", gr_n / opt_a)
        report.note_extreme("worst_ratio_adaptive_greedy", gr_a / opt_a)
    return _run("theorem_ratios", family, ctx, body, needs_k=True)


def check_kempe_baseline(family, ctx: CheckContext = CheckContext()) -> CheckReport:
    """GR_N >= (1 - 1/e) OPT_N."""
    def body(report, g, text):
        opt_n = opt_nonadaptive(g, ctx.k, ctx.limits, ctx.cap).value
        gr_n = nonadaptive_greedy(g, ctx.k, _exact(ctx)).value
        report.record(text, {"k": ctx.k}, kempe_threshold() * opt_n, gr_n)
        report.note_extreme("worst_ratio", gr_n / opt_n)
    return _run("kempe_baseline", family, ctx, body, needs_k=True)


def check_gap_ceiling(family, ctx: CheckContext = CheckContext()) -> CheckReport:
    """OPT_N <= OPT_A and AG(G, k) <= 2 / (1 - (1 - 1/k)^k) <= 2e/(e - 1)."""
    def body(report, g, text):
        rep = adaptivity_gap(g, ctx.k, ctx.limits, ctx.cap)
        report.record(text, {"k": ctx.k, "bound": "dominance"}, rep.opt_n, rep.opt_a)
        report.record(text, {"k": ctx.k, "bound": "per_k"}, rep.gap, gap_ceiling(ctx.k))
        report.record(text, {"k": ctx.k, "bound": "global"}, rep.gap, GLOBAL_GAP_CEILING)
        report.note_extreme("max_gap", rep.gap, max)
    return _run("gap_ceiling", family, ctx, body, needs_k=True)


def check_oracle_consistency(family, ctx: CheckContext = CheckContext()) -> CheckReport:
    """
    The OPT_A witness re-evaluates to the induction value on two independent paths,
    and the OPT_N witness played as an observation-blind tree re-evaluates to OPT_N.
    """
    def body(report, g, text):
        res = opt_adaptive(g, ctx.k, ctx.limits, ctx.cap)
        opt_n = opt_nonadaptive(g, ctx.k, ctx.limits, ctx.cap)
        report.record_equal(text, {"k": ctx.k, "path": "tree"}, evaluate_decision_tree(g, res.witness, ctx.cap),
                            res.value, tol=1e-12)
        report.record_equal(text, {"k": ctx.k, "path": "policy"},
                            evaluate_policy(g, TreePolicy(res.witness), _exact(ctx)), res.value, tol=1e-12)
        blind = constant_tree(g, sorted(opt_n.witness))
        report.record_equal(text, {"k": ctx.k, "path": "constant_tree"}, evaluate_decision_tree(g, blind, ctx.cap),
                            opt_n.value, tol=1e-12)
        report.record(text, {"k": ctx.k, "path": "dominance"}, opt_n.value, res.value)
    return _run("oracle_consistency", family, ctx, body, needs_k=True)


def check_canonical_keys(family, ctx: CheckContext = CheckContext()) -> CheckReport:
    """Backward induction keyed by canonical realisations equals the ordered-history induction."""
    def body(report, g, text):
        keyed = opt_adaptive(g, ctx.k, ctx.limits, ctx.cap)
        ordered = opt_adaptive(g, ctx.k, ctx.limits, ctx.cap, canonical=False)
        report.record_equal(text, {"k": ctx.k, "states": [keyed.states, ordered.states]},
                            ordered.value, keyed.value, tol=1e-12)
    return _run("canonical_keys", family, ctx, body, needs_k=True)


def check_greedy_diminishing(family, ctx: CheckContext = CheckContext()) -> CheckReport:
    """Greedy marginal gains are non-increasing along the trace."""
    def body(report, g, text):
        gains = nonadaptive_greedy(g, ctx.k, _exact(ctx)).gains
        for t in range(1, len(gains)):
            report.record(text, {"k": ctx.k, "t": t + 1}, gains[t], gains[t - 1])
    return _run("greedy_diminishing", family, ctx, body, needs_k=True)


# ----------------------------------------------------------------------
# Gap search
# ----------------------------------------------------------------------

@dataclass
class GapSearch:
    best: GapReport | None = None
    label: str | None = None
    graph: str | None = None
    report: CheckReport = field(default_factory=lambda: CheckReport("gap_ceiling"))

    def to_json(self) -> dict:
        return {"best": None if self.best is None else self.best.to_dict(), "label": self.label,
                "graph": self.graph, "ceiling": self.report.to_json()}


def search_gap_witness(family, ctx: CheckContext = CheckContext(), target: float | None = None) -> GapSearch:
    """Largest AG(G, k) over the family; every gap is checked against the per-k ceiling."""
    out = GapSearch()
    for label, g in tqdm(family, desc="gap-search", disable=not ctx.progress, leave=False):
        if ctx.k > g.n:
            out.report.skipped += 1
            continue
        try:
            rep = adaptivity_gap(g, ctx.k, ctx.limits, ctx.cap)
        except EnumerationTooLarge as e:
            out.report.skipped += 1
            log.debug(f"[GapSearch] skipped {label}: {e}")
            continue
        out.report.tested += 1
        text = format_graph(g)
        out.report.record(text, {"k": ctx.k}, rep.gap, gap_ceiling(ctx.k))
        if out.best is None or rep.gap > out.best.gap + 1e-12:
            out.best, out.label, out.graph = rep, label, text
            log.info(f"[GapSearch] new best gap {rep.gap:.6f} on {label}")
        if target is not None and rep.gap >= target:
            log.info(f"[GapSearch] target {target} reached")
            break
    return out


CHECKS: dict[str, Callable[..., CheckReport]] = {
    "two_level_upper": check_two_level_upper,
    "marginal_upper": check_marginal_upper,
    "strong_marginal_upper": check_strong_marginal_upper,
    "two_level_equivalence": check_two_level_equivalence,
    "adaptive_submodularity": check_adaptive_submodularity,
    "strong_adaptive_submodularity": check_strong_adaptive_submodularity,
    "rand_lower": check_rand_lower,
    "hybrid_bound": check_hybrid_bound,
    "hybrid_bound_strong": partial(check_hybrid_bound, strong=True),
    "opt_bound": check_opt_bound,
    "opt_bound_strong": partial(check_opt_bound, strong=True),
    "theorem_ratios": check_theorem_ratios,
    "kempe_baseline": check_kempe_baseline,
    "gap_ceiling": check_gap_ceiling,
    "oracle_consistency": check_oracle_consistency,
    "canonical_keys": check_canonical_keys,
    "greedy_diminishing": check_greedy_diminishing,
}

LEMMA_SUITE = ("two_level_upper", "marginal_upper", "adaptive_submodularity", "strong_adaptive_submodularity",
               "rand_lower", "hybrid_bound", "hybrid_bound_strong", "opt_bound", "opt_bound_strong")


def resolve_checks(ids: Iterable[str]) -> list[str]:
    """Expands 'all' / 'lemmas' and rejects unknown ids."""
    out: list[str] = []
    for cid in ids:
        if cid == "all":
            out.extend(CHECKS)
        elif cid == "lemmas":
            out.extend(LEMMA_SUITE)
        elif cid in CHECKS:
            out.append(cid)
        else:
            raise UnknownCheck(f"unknown check '{cid}'; known: {', '.join(sorted(CHECKS))}")
    return list(dict.fromkeys(out))


def run_checks(ids: Iterable[str], family_factory: Callable[[], Iterable[LabelledGraph]],
               ctx: CheckContext) -> list[CheckReport]:
    """Runs each check on a fresh pass over the family."""
    return [CHECKS[cid](family_factory(), ctx) for cid in resolve_checks(ids)]
