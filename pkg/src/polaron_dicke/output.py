"""Deterministic CSV/JSON output with embedded run metadata.

Every CSV carries a '#'-prefixed header of key=value lines (tool version,
resolved config hash, bath constants, the full flattened config) followed
by a units-annotated column header.  Floats are printed with 17
significant digits, so identical configs give byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, _flatten

__all__ = ["format_value", "write_table", "write_json", "run_metadata"]


def format_value(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def run_metadata(cfg: RunConfig, command: str, constants: dict | None = None, **extra) -> dict:
    """Header/sidecar metadata block for one command run."""
    meta = {
        "tool": "polaron-dicke",
        "version": __version__,
        "command": command,
        "config_hash": cfg.hash,
    }
    if constants:
        meta.update({f"constants.{k}": v for k, v in sorted(constants.items())})
    meta.update({f"config.{k}": v for k, v in _flatten(cfg.resolved)})
    meta.update(extra)
    return meta


def write_table(path, columns, metadata: dict) -> Path:
    """Write named columns as CSV with a commented metadata header.

    ``columns`` is a list of (name, array) pairs; names should carry their
    units (t_ps, n, I_per_ps, ...).
    """
    path = Path(path)
    names = [name for name, _ in columns]
    arrays = [np.asarray(values) for _, values in columns]
    length = arrays[0].shape[0]
    if any(a.shape != (length,) for a in arrays):
        raise ValueError("all columns must be 1-d and of equal length")
    lines = [f"# {key}={format_value(value)}" for key, value in metadata.items()]
    lines.append(",".join(names))
    for i in range(length):
        lines.append(",".join(format_value(a[i]) for a in arrays))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj]
    return obj


def write_json(path, payload: dict) -> Path:
    path = Path(path)
    path.write_text(
        json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return path
