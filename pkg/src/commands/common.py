# src/commands/common.py
import logging

from omegaconf import DictConfig, ListConfig

from src.checks.lemmas import CheckContext
from src.errors import EnumerationTooLarge, InvalidInstance
from src.families import LabelledGraph
from src.graph import InfluenceGraph, load_graph
from src.oracle import adaptivity_gap
from src.utils.instantiators import instantiate_evaluator, instantiate_family, instantiate_limits

log = logging.getLogger(__name__)


def load_instance(cfg: DictConfig) -> LabelledGraph:
    """The --graph file, or the first instance of the selected family."""
    if cfg.get("graph"):
        g = load_graph(str(cfg.graph))
        log.info(f"[CLI] loaded {cfg.graph}: n={g.n} m={g.m}")
        return LabelledGraph(str(cfg.graph), g)
    family = instantiate_family(cfg)
    for item in family:
        log.info(f"[CLI] using generated instance {item.label}")
        return item
    raise InvalidInstance(f"family '{family.kind}' produced no instance")


def k_values(cfg: DictConfig) -> list[int]:
    ks = cfg.get("k_range")
    if ks is None:
        ks = [cfg.k]
    elif not isinstance(ks, (list, tuple, ListConfig)):
        ks = [ks]
    ks = [int(k) for k in ks]
    if any(k < 1 for k in ks):
        raise ValueError(f"every k must be >= 1, got {ks}")
    return ks


def evaluator_for(cfg: DictConfig):
    return instantiate_evaluator(cfg)


def check_context(cfg: DictConfig, k: int) -> CheckContext:
    size = cfg.get("max_realisation_size")
    return CheckContext(k=k, cap=int(cfg.enumeration_cap), limits=instantiate_limits(cfg),
                        policy=str(cfg.get("policy", "optimal")),
                        max_realisation_size=None if size is None else int(size),
                        progress=bool(cfg.get("progress", False)))


def oracle_columns(cfg: DictConfig, g: InfluenceGraph, k: int, value: float) -> dict:
    """ratio_vs_opt_a and gap for a report row; empty when disabled or refused by the guard."""
    if not cfg.get("compare_oracle", False):
        return {}
    try:
        rep = adaptivity_gap(g, k, instantiate_limits(cfg), int(cfg.enumeration_cap))
    except EnumerationTooLarge as e:
        log.info(f"[CLI] no oracle comparison: {e}")
        return {}
    return {"ratio_vs_opt_a": value / rep.opt_a if rep.opt_a > 0 else None, "gap": rep.gap}
