# src/utils/instantiators.py
import hydra
from hydra.errors import InstantiationException
from omegaconf import DictConfig

from src.diffusion import ExactEvaluator
from src.oracle import DEFAULT_LIMITS, OracleLimits


def _build(node: DictConfig):
    # re-raise constructor errors unwrapped from InstantiationException
    try:
        return hydra.utils.instantiate(node)
    except InstantiationException as e:
        if isinstance(e.__cause__, Exception):
            raise e.__cause__ from None
        raise


def instantiate_evaluator(cfg: DictConfig):
    """Exact or Monte Carlo spread evaluator from the `mode` group."""
    mode_cfg = cfg.get("mode", None)
    if mode_cfg is None or mode_cfg.get("_target_") is None:
        return ExactEvaluator(cfg.get("enumeration_cap", 20))
    return _build(mode_cfg)


def instantiate_family(cfg: DictConfig):
    return _build(cfg.family)


def instantiate_smsm(cfg: DictConfig):
    return _build(cfg.smsm)


def instantiate_limits(cfg: DictConfig) -> OracleLimits:
    oracle_cfg = cfg.get("oracle", None)
    if oracle_cfg is None or oracle_cfg.get("_target_") is None:
        return DEFAULT_LIMITS
    return _build(oracle_cfg)
