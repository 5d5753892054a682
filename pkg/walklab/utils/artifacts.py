"""
Run artifacts: manifest.json, CSV tables and summary.txt.

Everything is written deterministically (sorted keys, repr floats, no
timestamps) so identical configurations produce identical bytes.
"""

import csv
import io
import json
import logging
import math
import os
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np

from ..core.errors import ConfigError

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"
SUMMARY = "summary.txt"


def jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays, tuples and non-finite floats into plain JSON values."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set)):
        items = sorted(value, key=repr) if isinstance(value, set) else value
        return [jsonable(v) for v in items]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def dumps(data: Any) -> str:
    return json.dumps(jsonable(data), sort_keys=True, indent=2) + "\n"


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value


def csv_text(rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


class RunWriter:
    """Collects the files of one run and writes them into the output directory."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.tables: Dict[str, List[Sequence]] = {}
        self.summary_lines: List[str] = []

    def table(self, name: str, rows: Iterable[Sequence]):
        self.tables[name if name.endswith(".csv") else f"{name}.csv"] = list(rows)

    def line(self, text: str = ""):
        self.summary_lines.append(text)

    def write(self, manifest: Dict[str, Any]) -> List[str]:
        try:
            os.makedirs(self.out_dir, exist_ok=True)
        except OSError as e:
            raise ConfigError(f"Output directory {self.out_dir!r} is not writable: {e}", [str(e)]) from e
        written = []
        manifest = dict(manifest)
        manifest["files"] = sorted(self.tables) + [SUMMARY]
        for name in sorted(self.tables):
            written.append(self._write(name, csv_text(self.tables[name])))
        written.append(self._write(SUMMARY, "\n".join(self.summary_lines) + "\n"))
        written.append(self._write(MANIFEST, dumps(manifest)))
        logger.info(f"[Artifacts] Wrote {len(written)} files to {self.out_dir}")
        return written

    def _write(self, name: str, text: str) -> str:
        path = os.path.join(self.out_dir, name)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        return path


def read_manifest(run_dir: str) -> Dict[str, Any]:
    path = os.path.join(run_dir, MANIFEST)
    if not os.path.exists(path):
        raise ConfigError(f"No {MANIFEST} in {run_dir}", [f"missing {path}"])
    with open(path, "r", encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Corrupt manifest {path}: {e}", [str(e)]) from e


def read_bytes(run_dir: str, name: str) -> bytes:
    with open(os.path.join(run_dir, name), "rb") as fh:
        return fh.read()
