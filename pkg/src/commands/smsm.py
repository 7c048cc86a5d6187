# src/commands/smsm.py
import logging
import time

from omegaconf import DictConfig
from rich.table import Table

from src.checks.report import merge_reports
from src.checks.section2 import run_smsm_suite
from src.commands import EXIT_OK, EXIT_VIOLATIONS, CommandResult
from src.errors import InvalidInstance
from src.smsm import load_smsm_instance, smsm_greedy, smsm_opt_adaptive
from src.utils.instantiators import instantiate_smsm

log = logging.getLogger(__name__)


def _instance(cfg: DictConfig):
    if cfg.get("instance"):
        return str(cfg.instance), load_smsm_instance(str(cfg.instance))
    for idx, inst in enumerate(instantiate_smsm(cfg)):
        return f"smsm[{idx}]", inst
    raise InvalidInstance("the SMSM family produced no instance")


def run_greedy(cfg: DictConfig) -> CommandResult:
    label, inst = _instance(cfg)
    cap = int(cfg.enumeration_cap)
    start = time.perf_counter()
    trace = smsm_greedy(inst, cap)
    opt = smsm_opt_adaptive(inst)
    seconds = time.perf_counter() - start
    ratio = trace.value / opt.value if opt.value > 0 else 1.0
    log.info(f"[SMSM] {label}: GR_N={trace.value:.6f} OPT_A={opt.value:.6f} ratio={ratio:.4f}")

    table = Table(title=f"SMSM greedy k={inst.k}")
    table.add_column("t", justify="right")
    table.add_column("item", justify="right")
    table.add_column("value", justify="right")
    for t, (i, val) in enumerate(zip(trace.seeds, trace.values), start=1):
        table.add_row(str(t), str(i), f"{val:.6f}")
    table.add_row("", "OPT_A", f"{opt.value:.6f}")

    doc = {"instance": label, "smsm": inst.to_json(), "trace": trace.to_dict(), "opt_a": opt.value,
           "ratio_vs_opt_a": ratio, "witness": opt.witness.to_json(), "seconds": seconds}
    rows = [{"instance": label, "k": inst.k, "algorithm": "smsm_greedy", "value": trace.value,
             "ratio_vs_opt_a": ratio, "seconds": seconds}]
    return CommandResult(doc, rows, table=table)


def run_verify(cfg: DictConfig) -> CommandResult:
    if cfg.get("instance"):
        instances = [load_smsm_instance(str(cfg.instance))]
    else:
        instances = instantiate_smsm(cfg)
    start = time.perf_counter()
    reports = run_smsm_suite(instances, bool(cfg.get("progress", False)), int(cfg.enumeration_cap))
    seconds = time.perf_counter() - start

    table = Table(title="SMSM verification")
    for col in ("check", "tested", "skipped", "violations", "worst ratio"):
        table.add_column(col, justify="right")
    rows = []
    for report in reports:
        worst = report.notes.get("worst_ratio")
        table.add_row(report.check, str(report.tested), str(report.skipped), str(len(report.violations)),
                      "-" if worst is None else f"{worst:.4f}")
        rows.append({"instance": "smsm", "algorithm": report.check, "value": report.worst_slack,
                     "ratio_vs_opt_a": worst, "seconds": seconds})
    doc = merge_reports(reports, seconds=seconds)
    return CommandResult(doc, rows, EXIT_OK if doc["ok"] else EXIT_VIOLATIONS, table)
