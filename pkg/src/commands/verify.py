# src/commands/verify.py
import logging
import time

from omegaconf import DictConfig, OmegaConf
from rich.table import Table

from src.bounds import threshold_limits
from src.checks.lemmas import resolve_checks, run_checks
from src.checks.report import merge_reports
from src.commands import EXIT_OK, EXIT_VIOLATIONS, CommandResult
from src.commands.common import check_context, k_values
from src.utils.instantiators import instantiate_family

log = logging.getLogger(__name__)


def run(cfg: DictConfig) -> CommandResult:
    checks = cfg.checks
    ids = resolve_checks([checks] if isinstance(checks, str) else list(checks))
    ks = k_values(cfg)
    family_cfg = OmegaConf.to_container(cfg.family, resolve=True)

    table = Table(title="verification")
    for col in ("check", "k", "tested", "skipped", "violations", "worst slack"):
        table.add_column(col, justify="right")

    reports, rows = [], []
    for k in ks:
        start = time.perf_counter()
        batch = run_checks(ids, lambda: instantiate_family(cfg), check_context(cfg, k))
        seconds = time.perf_counter() - start
        for report in batch:
            report.notes.setdefault("k", k)
            slack = "-" if report.worst_slack is None else f"{report.worst_slack:.3e}"
            table.add_row(report.check, str(k), str(report.tested), str(report.skipped),
                          str(len(report.violations)), slack)
            rows.append({"instance": family_cfg.get("_target_", "family"), "k": k, "algorithm": report.check,
                         "value": report.worst_slack, "seconds": seconds})
        reports.extend(batch)

    limits = threshold_limits()
    doc = merge_reports(reports, family=family_cfg, k_range=ks, thresholds=limits)
    code = EXIT_OK if doc["ok"] and all(v["ok"] for v in limits.values()) else EXIT_VIOLATIONS
    log.info(f"[Verify] {len(reports)} reports, {doc['violations']} violations")
    return CommandResult(doc, rows, code, table)
