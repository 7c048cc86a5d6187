# src/commands/adaptive_greedy.py
import logging
import time

from omegaconf import DictConfig
from rich.table import Table

from src.commands import CommandResult
from src.commands.common import evaluator_for, load_instance, oracle_columns
from src.graph import format_graph
from src.policies import (adaptive_greedy, adaptive_greedy_trace, estimate_policy, evaluate_policy,
                          selection_probabilities)
from src.realisation import EMPTY

log = logging.getLogger(__name__)


def run(cfg: DictConfig) -> CommandResult:
    label, g = load_instance(cfg)
    k = int(cfg.k)
    evaluator = evaluator_for(cfg)

    start = time.perf_counter()
    pi = adaptive_greedy(g, k, evaluator)
    doc = {"instance": label, "graph": format_graph(g), "k": k, "evaluator": evaluator.describe(),
           "first_seed": pi.decide(EMPTY)}
    if evaluator.mode == "mc":
        estimate = estimate_policy(g, pi, evaluator.samples, evaluator.seed)
        value = estimate.mean
        doc["estimate"] = estimate.to_dict()
    else:
        value = evaluate_policy(g, pi, evaluator)
        doc["values"] = adaptive_greedy_trace(g, k, evaluator.cap)
        doc["selection_probabilities"] = selection_probabilities(g, pi).to_list()
    seconds = time.perf_counter() - start
    doc.update(value=value, seconds=seconds)
    log.info(f"[AdaptiveGreedy] {label}: GR_A={value:.6f} ({seconds:.2f}s)")

    table = Table(title=f"adaptive greedy k={k} ({evaluator.mode})")
    table.add_column("quantity")
    table.add_column("value", justify="right")
    table.add_row("first seed", str(doc["first_seed"]))
    table.add_row("GR_A", f"{value:.6f}")
    if "estimate" in doc:
        table.add_row("95% half width", f"{doc['estimate']['half_width']:.6f}")

    compared = oracle_columns(cfg, g, k, value)
    doc.update(compared)
    rows = [{"instance": label, "k": k, "algorithm": "adaptive_greedy", "value": value, "seconds": seconds,
             **compared}]
    return CommandResult(doc, rows, table=table)
