"""Checks of the SMSM analysis on individual instances."""

import json
import logging
from itertools import product
from typing import Iterable

import numpy as np
from tqdm import tqdm

from src.bounds import smsm_threshold
from src.checks.report import CheckReport
from src.enumeration import DEFAULT_CAP
from src.errors import EnumerationTooLarge
from src.smsm import (SmsmInstance, smsm_double_value, smsm_expected_marginal, smsm_expected_value, smsm_greedy,
                      smsm_hybrid_value, smsm_opt_adaptive, smsm_opt_nonadaptive, smsm_rand_value)

log = logging.getLogger(__name__)

LATTICE_TOL = 1e-12


def _dump(inst: SmsmInstance) -> str:
    return json.dumps(inst.to_json())


def check_objective_lattice(inst: SmsmInstance, report: CheckReport | None = None,
                            max_points: int = 4096) -> CheckReport:
    """
    f(x v y) + f(x ^ y) <= f(x) + f(y) and f(x) <= f(x v y) over every pair of
    lattice points whose coordinates are states of the matching item (or 0).
    """
    report = report or CheckReport("smsm_lattice")
    axes = [sorted({0.0} | {v for v, _ in dist}) for dist in inst.items]
    count = 1
    for axis in axes:
        count *= len(axis)
    if count > max_points:
        raise EnumerationTooLarge(count, max_points, "lattice points")
    points = [np.array(p) for p in product(*axes)]
    f = inst.objective
    values = [f(p) for p in points]
    text = _dump(inst)
    for i, x in enumerate(points):
        for j in range(i, len(points)):
            y = points[j]
            join, meet = np.maximum(x, y), np.minimum(x, y)
            f_join = f(join)
            report.record(text, {"x": x.tolist(), "y": y.tolist(), "property": "submodular"},
                          f_join + f(meet), values[i] + values[j], tol=LATTICE_TOL)
            report.record(text, {"x": x.tolist(), "y": y.tolist(), "property": "monotone"},
                          max(values[i], values[j]), f_join, tol=LATTICE_TOL)
    return report


def smsm_check_section2(inst: SmsmInstance, report: CheckReport | None = None,
                        cap: int = DEFAULT_CAP) -> CheckReport:
    """
    With pi the optimal adaptive policy, x its selection probabilities and S
    ranging over the greedy prefixes S_0 .. S_{k-1}:
      k (Rand(S) - E f(theta(S))) == sum_{i not in S} x_i E[Delta(i | theta(S))]
      Hyb(S) <= E f(theta(S) v theta-hat(S)) + sum_{i not in S} x_i E[Delta(i | theta(S))]
      OPT_A  <= Hyb(S)
      GR_N(k) >= 1/2 (1 - (1 - 2/k)^k) OPT_A            (k >= 2)
      OPT_A  >= best non-adaptive value
    """
    report = report or CheckReport("smsm_section2")
    text = _dump(inst)
    k = inst.k
    opt = smsm_opt_adaptive(inst)
    tree = opt.witness
    x = tree.selection_probabilities(inst.n)
    trace = smsm_greedy(inst, cap)

    for t in range(k):
        S = set(trace.seeds[:t])
        params = {"S": sorted(S), "k": k}
        base = smsm_expected_value(inst, S, cap)
        increments = sum(x[i] * smsm_expected_marginal(inst, S, i, cap) for i in range(inst.n) if i not in S)
        rand = smsm_rand_value(inst, S, x, cap)
        report.record_equal(text, {**params, "bound": "rand_identity"}, k * (rand - base), increments)
        hyb = smsm_hybrid_value(inst, S, tree, cap)
        report.record(text, {**params, "bound": "hybrid_upper"}, hyb, smsm_double_value(inst, S, cap) + increments)
        report.record(text, {**params, "bound": "opt_below_hybrid"}, opt.value, hyb)

    if k >= 2:
        report.record(text, {"k": k, "bound": "ratio"}, smsm_threshold(k) * opt.value, trace.value)
    if opt.value > 0:
        report.note_extreme("worst_ratio", trace.value / opt.value)
    report.record(text, {"k": k, "bound": "dominance"}, smsm_opt_nonadaptive(inst, cap).value, opt.value)
    return report


def run_smsm_suite(instances: Iterable[SmsmInstance], progress: bool = False,
                   cap: int = DEFAULT_CAP) -> list[CheckReport]:
    section2 = CheckReport("smsm_section2")
    lattice = CheckReport("smsm_lattice")
    for inst in tqdm(instances, desc="smsm", disable=not progress, leave=False):
        for report, run in ((section2, lambda r: smsm_check_section2(inst, r, cap)),
                            (lattice, lambda r: check_objective_lattice(inst, r))):
            try:
                run(report)
            except EnumerationTooLarge as e:
                report.skipped += 1
                log.debug(f"[SMSM] skipped instance: {e}")
                continue
            report.tested += 1
    for report in (section2, lattice):
        log.info(f"[SMSM] {report.check}: {report.tested} tested, {len(report.violations)} violations")
    return [section2, lattice]
