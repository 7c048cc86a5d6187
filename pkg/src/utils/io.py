# src/utils/io.py
"""Report emitters. Files are written next to their destination and renamed into place."""

import csv
import io
import json
import logging
import os

import numpy as np

log = logging.getLogger(__name__)

CSV_COLUMNS = ("instance", "k", "algorithm", "value", "ratio_vs_opt_a", "gap", "seconds")


def _default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def to_json_text(doc) -> str:
    return json.dumps(doc, indent=2, default=_default)


def atomic_write(path: str, text: str) -> str:
    """Writes text to path via <path>.tmp + os.replace, so readers never see a partial file."""
    target_dir = os.path.dirname(os.path.abspath(path))
    os.makedirs(target_dir, exist_ok=True)
    tmp_path = path + ".tmp"
    try:
        with open(tmp_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
    log.info(f"[IO] wrote {path}")
    return path


def rows_to_csv(rows: list[dict], columns=CSV_COLUMNS) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: row.get(c, "") for c in columns})
    return buf.getvalue()


def write_report(path: str, doc: dict, fmt: str = "json", rows: list[dict] | None = None) -> str:
    """JSON is lossless; CSV flattens `rows` (one per instance, k and algorithm)."""
    if fmt == "json":
        return atomic_write(path, to_json_text(doc) + "\n")
    if fmt == "csv":
        return atomic_write(path, rows_to_csv(rows or []))
    raise ValueError(f"unknown output format '{fmt}', expected json or csv")
