"""Report envelopes and the three output formats (structured JSON, CSV, aligned text).

Structured output is deterministic: keys sorted, no timestamps, exact values
rendered as strings.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from fractions import Fraction
from importlib import metadata

import numpy as np

from .exactreal import QuadReal
from .setops import ElementSet

__all__ = ["tool_version", "jsonable", "envelope", "to_json", "to_text", "to_csv", "render"]


def tool_version() -> str:
    try:
        return metadata.version("approxring")
    except metadata.PackageNotFoundError:
        from . import __version__

        return __version__


def jsonable(obj):
    """Convert library results to plain JSON data, keeping exact values exact."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (Fraction, QuadReal)):
        return str(obj)
    if isinstance(obj, ElementSet):
        return obj.encode()
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(jsonable(v) for v in obj)
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def envelope(command: str, config: dict, result) -> dict:
    """Wrap a result with the tool version and the fully resolved configuration."""
    return {
        "tool": "approxring",
        "version": tool_version(),
        "command": command,
        "config": jsonable(config),
        "result": jsonable(result),
    }


def to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _flatten(obj, prefix: str = "") -> list[tuple[str, str]]:
    if isinstance(obj, dict):
        rows = []
        for k in sorted(obj):
            rows.extend(_flatten(obj[k], f"{prefix}.{k}" if prefix else str(k)))
        return rows
    if isinstance(obj, list) and obj and any(isinstance(v, (dict, list)) for v in obj):
        rows = []
        for i, v in enumerate(obj):
            rows.extend(_flatten(v, f"{prefix}[{i}]"))
        return rows
    if isinstance(obj, list):
        return [(prefix, " ".join(str(v) for v in obj))]
    return [(prefix, "" if obj is None else str(obj))]


def to_text(report: dict) -> str:
    """Aligned two-column table of the flattened result."""
    rows = _flatten(report.get("result", report))
    width = max((len(k) for k, _ in rows), default=0)
    head = f"# {report.get('command', '')} (approxring {report.get('version', '')})"
    return "\n".join([head] + [f"{k.ljust(width)}  {v}" for k, v in rows]) + "\n"


def to_csv(report: dict) -> str:
    """A result carrying a ``table`` (list of rows with a header) is written as is;
    anything else as flattened key,value pairs."""
    result = report.get("result", report)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    table = result.get("table") if isinstance(result, dict) else None
    if table:
        w.writerow(table["header"])
        w.writerows(table["rows"])
    else:
        w.writerow(["key", "value"])
        w.writerows(_flatten(result))
    return buf.getvalue()


def render(report: dict, fmt: str) -> str:
    if fmt == "structured":
        return to_json(report)
    if fmt == "csv":
        return to_csv(report)
    if fmt == "text":
        return to_text(report)
    raise ValueError(f"unknown format {fmt!r}")
