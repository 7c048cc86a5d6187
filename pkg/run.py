import logging
import sys

import hydra
from omegaconf import DictConfig

from src.commands import run_command

log = logging.getLogger(__name__)


@hydra.main(version_base="1.3", config_path="configs", config_name="main")
def main(cfg: DictConfig):
    mode = cfg.mode.get("_target_", "exact").rsplit(".", 1)[-1]
    log.info(f"[CLI] command={cfg.command} k={cfg.k} seed={cfg.seed} evaluator={mode}")
    # SystemExit passes through Hydra's job runner
    sys.exit(run_command(cfg))


if __name__ == "__main__":
    main()
