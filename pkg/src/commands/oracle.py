# src/commands/oracle.py
import logging
import os
import time

from omegaconf import DictConfig
from rich.table import Table

from src.commands import CommandResult, output_path
from src.commands.common import k_values, load_instance
from src.graph import format_graph
from src.oracle import adaptivity_gap, tree_seeds
from src.utils.instantiators import instantiate_limits
from src.utils.io import atomic_write

log = logging.getLogger(__name__)


def witness_dir(cfg: DictConfig) -> str:
    if cfg.get("out"):
        return os.path.dirname(os.path.abspath(str(cfg.out)))
    return str(cfg.paths.witness_dir)


def run(cfg: DictConfig) -> CommandResult:
    label, g = load_instance(cfg)
    limits = instantiate_limits(cfg)
    cap = int(cfg.enumeration_cap)
    stem = os.path.splitext(os.path.basename(output_path(cfg)))[0]

    table = Table(title=f"oracle: {label}")
    for col in ("k", "OPT_N", "OPT_A", "gap", "witness"):
        table.add_column(col, justify="right")

    results, rows = [], []
    for k in k_values(cfg):
        start = time.perf_counter()
        rep = adaptivity_gap(g, k, limits, cap)
        seconds = time.perf_counter() - start
        tree_path = os.path.join(witness_dir(cfg), f"{stem}_witness_k{k}.json")
        atomic_write(tree_path, rep.adaptive.witness.dumps() + "\n")
        log.info(f"[Oracle] k={k}: OPT_N={rep.opt_n:.6f} OPT_A={rep.opt_a:.6f} gap={rep.gap:.6f} ({seconds:.2f}s)")

        results.append({**rep.to_dict(), "nonadaptive_witness": sorted(rep.nonadaptive.witness),
                        "states": rep.adaptive.states, "witness_seed_sets": len(set(tree_seeds(rep.adaptive.witness))),
                        "witness_file": tree_path, "seconds": seconds})
        table.add_row(str(k), f"{rep.opt_n:.6f}", f"{rep.opt_a:.6f}", f"{rep.gap:.6f}", tree_path)
        rows.append({"instance": label, "k": k, "algorithm": "opt_n", "value": rep.opt_n,
                     "ratio_vs_opt_a": rep.opt_n / rep.opt_a, "gap": rep.gap, "seconds": seconds})
        rows.append({"instance": label, "k": k, "algorithm": "opt_a", "value": rep.opt_a,
                     "ratio_vs_opt_a": 1.0, "gap": rep.gap, "seconds": seconds})

    doc = {"instance": label, "graph": format_graph(g), "results": results}
    return CommandResult(doc, rows, table=table)
