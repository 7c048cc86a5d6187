# src/commands/gap_search.py
import logging
import time

from omegaconf import DictConfig
from rich.table import Table

from src.commands import EXIT_OK, EXIT_VIOLATIONS, CommandResult
from src.commands.common import check_context, k_values
from src.checks.lemmas import search_gap_witness
from src.utils.instantiators import instantiate_family

log = logging.getLogger(__name__)


def run(cfg: DictConfig) -> CommandResult:
    target = cfg.get("target")
    table = Table(title="adaptivity gap search")
    for col in ("k", "tested", "skipped", "best gap", "instance"):
        table.add_column(col, justify="right")

    searches, rows, code = [], [], EXIT_OK
    for k in k_values(cfg):
        family = instantiate_family(cfg)
        start = time.perf_counter()
        found = search_gap_witness(family, check_context(cfg, k), None if target is None else float(target))
        seconds = time.perf_counter() - start
        if not found.report.ok:
            code = EXIT_VIOLATIONS
        best = found.best
        searches.append({"k": k, "family": family.describe(), "seconds": seconds, **found.to_json()})
        table.add_row(str(k), str(found.report.tested), str(found.report.skipped),
                      "-" if best is None else f"{best.gap:.6f}", found.label or "-")
        if best is not None:
            rows.append({"instance": found.label, "k": k, "algorithm": "gap_search", "value": best.opt_a,
                         "ratio_vs_opt_a": best.opt_n / best.opt_a, "gap": best.gap, "seconds": seconds})

    return CommandResult({"searches": searches}, rows, code, table)
