# src/commands/greedy.py
import logging
import time

from omegaconf import DictConfig
from rich.table import Table

from src.commands import CommandResult
from src.commands.common import evaluator_for, load_instance, oracle_columns
from src.graph import format_graph
from src.policies import nonadaptive_greedy

log = logging.getLogger(__name__)


def run(cfg: DictConfig) -> CommandResult:
    label, g = load_instance(cfg)
    k = int(cfg.k)
    evaluator = evaluator_for(cfg)

    start = time.perf_counter()
    trace = nonadaptive_greedy(g, k, evaluator)
    seconds = time.perf_counter() - start
    log.info(f"[Greedy] {label}: seeds={list(trace.seeds)} value={trace.value:.6f} ({seconds:.2f}s)")

    doc = {"instance": label, "graph": format_graph(g), "k": k, "evaluator": evaluator.describe(),
           "trace": trace.to_dict(), "value": trace.value, "seconds": seconds}
    if evaluator.mode == "mc":
        # fresh stream for the reported interval
        doc["estimate"] = evaluator.estimate(g, trace.seeds, 9).to_dict()

    table = Table(title=f"greedy k={k} ({evaluator.mode})")
    table.add_column("t", justify="right")
    table.add_column("seed", justify="right")
    table.add_column("value", justify="right")
    for t, (v, val) in enumerate(zip(trace.seeds, trace.values), start=1):
        table.add_row(str(t), str(v), f"{val:.6f}")

    compared = oracle_columns(cfg, g, k, trace.value)
    doc.update(compared)
    rows = [{"instance": label, "k": k, "algorithm": "greedy", "value": trace.value, "seconds": seconds, **compared}]
    return CommandResult(doc, rows, table=table)
