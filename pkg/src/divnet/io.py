"""File emission: CSV and JSON with round-trip float formatting, plus run manifests."""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path

import numpy as np


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "" if math.isnan(v) else repr(v)
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def write_csv(path: Path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")
    return path


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return None if math.isnan(v) or math.isinf(v) else v
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n")
    return path


def write_table(path_stem: Path, fmt: str, header, rows) -> Path:
    """Write a table as ``<stem>.csv`` or ``<stem>.json`` (list of records)."""
    rows = list(rows)
    if fmt == "csv":
        return write_csv(Path(f"{path_stem}.csv"), header, rows)
    return write_json(Path(f"{path_stem}.json"), [dict(zip(header, r)) for r in rows])


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()
