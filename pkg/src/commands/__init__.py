# src/commands/__init__.py
"""
Command dispatch and the exit-code contract:
  0 success, 1 validation error, 2 resource-guard refusal, 3 verification violations.
"""

import logging
import os
from dataclasses import dataclass, field

from omegaconf import DictConfig
from rich.console import Console
from rich.table import Table

from src.errors import (EnumerationTooLarge, GraphFormatError, InconsistentRealisation, InvalidInstance,
                        InvalidSeedError, MalformedTree, PolicyViolation, UnknownCheck)
from src.utils.io import write_report

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_GUARD = 2
EXIT_VIOLATIONS = 3

VALIDATION_ERRORS = (GraphFormatError, InvalidSeedError, InvalidInstance, InconsistentRealisation, UnknownCheck,
                     MalformedTree, PolicyViolation, ValueError, FileNotFoundError)
FORMATS = ("json", "csv")

console = Console()
err_console = Console(stderr=True)


@dataclass
class CommandResult:
    doc: dict
    rows: list[dict] = field(default_factory=list)
    code: int = EXIT_OK
    table: Table | None = None


def _commands() -> dict:
    from src.commands import adaptive_greedy, gap_search, greedy, oracle, smsm, verify
    return {
        "greedy": greedy.run,
        "adaptive-greedy": adaptive_greedy.run,
        "oracle": oracle.run,
        "gap-search": gap_search.run,
        "verify": verify.run,
        "smsm-greedy": smsm.run_greedy,
        "smsm-verify": smsm.run_verify,
    }


def output_path(cfg: DictConfig) -> str:
    if cfg.get("out"):
        return str(cfg.out)
    return os.path.join(str(cfg.paths.out_dir), f"{cfg.command}.{cfg.format}")


def run_command(cfg: DictConfig) -> int:
    """Runs cfg.command, writes its report and returns the exit code."""
    commands = _commands()
    try:
        if cfg.command not in commands:
            raise ValueError(f"unknown command '{cfg.command}'; expected one of {', '.join(commands)}")
        if cfg.format not in FORMATS:
            raise ValueError(f"unknown format '{cfg.format}'; expected json or csv")
        result = commands[cfg.command](cfg)
    except EnumerationTooLarge as e:
        err_console.print(f"[bold red]refused:[/] {e}")
        log.error(f"[CLI] {cfg.command}: {e}")
        return EXIT_GUARD
    except VALIDATION_ERRORS as e:
        err_console.print(f"[bold red]error:[/] {e}")
        log.error(f"[CLI] {cfg.command}: {e}")
        return EXIT_INVALID

    doc = {"command": cfg.command, "seed": int(cfg.seed), **result.doc}
    path = write_report(output_path(cfg), doc, cfg.format, result.rows)
    if result.table is not None:
        console.print(result.table)
    console.print(f"report: {path}")
    if result.code == EXIT_VIOLATIONS:
        err_console.print("[bold red]violations found[/] (see report)")
    return result.code
