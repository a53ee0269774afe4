"""CSV / JSON serialization shared by the CLI.

CSV output: comma separated, LF line endings, floats with 17 significant
digits, and a leading ``# config: {...}`` comment carrying the effective
configuration. JSON output: sorted keys, two-space indent, an embedded
``config`` object.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any, Iterable, Optional, Sequence

import numpy as np


def fmt_float(x: float) -> str:
    return f"{float(x):.17g}"


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return fmt_float(value)
    return str(value)


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        val = float(obj)
        if val != val or val in (float("inf"), float("-inf")):
            return str(val)
        return val
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "value") and hasattr(obj, "name"):  # enums
        return obj.value
    return obj


def dumps_json(payload: Any, config: Optional[dict] = None) -> str:
    body = dict(payload) if isinstance(payload, dict) else {"result": payload}
    if config is not None:
        body = {"config": config, **body}
    return json.dumps(to_jsonable(body), sort_keys=True, indent=2) + "\n"


def dumps_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], config: Optional[dict] = None) -> str:
    lines = []
    if config is not None:
        lines.append("# config: " + json.dumps(to_jsonable(config), sort_keys=True, separators=(",", ":")))
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def read_csv_rows(text: str) -> list[list[str]]:
    """Rows of a CSV written by :func:`dumps_csv`, skipping ``#`` comments."""
    return [line.split(",") for line in text.splitlines() if line and not line.startswith("#")]


def checksum(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def matrix_csv(matrix: np.ndarray, config: Optional[dict] = None) -> str:
    """Square integer matrix, one row per line, no header row."""
    lines = []
    if config is not None:
        lines.append("# config: " + json.dumps(to_jsonable(config), sort_keys=True, separators=(",", ":")))
    lines.extend(",".join(str(int(v)) for v in row) for row in matrix)
    return "\n".join(lines) + "\n"


def matrix_json(matrix: np.ndarray, kind: str, params: dict, config: Optional[dict] = None) -> str:
    key = "entries" if kind == "toeplitz" else "exponents"
    payload = {"dimension": int(matrix.shape[0]), **params, key: matrix.astype(int).tolist()}
    return dumps_json(payload, config)


def load_matrix(path: str) -> np.ndarray:
    """Read a square matrix from a CSV (real or ``a+bj`` cells) or JSON export."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".json"):
        data = json.loads(text)
        if isinstance(data, dict):
            if "exponents" in data:
                n_base = int(data["n_base"])
                exps = np.array(data["exponents"], dtype=np.int64)
                return np.exp(2j * np.pi * exps / n_base)
            data = data.get("entries", data.get("matrix"))
        return np.array(data, dtype=np.complex128)
    rows = [[complex(c.strip().replace(" ", "")) for c in r] for r in read_csv_rows(text)]
    return np.array(rows, dtype=np.complex128)


def frequencies_jsonl(items: Iterable[tuple[Any, complex]]) -> str:
    out = []
    for freq, value in items:
        out.append(json.dumps({"support": freq.as_list(), "re": float(value.real), "im": float(value.imag)}, sort_keys=True))
    return "\n".join(out) + ("\n" if out else "")
