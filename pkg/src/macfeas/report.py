"""Report documents rendered as JSON or as aligned text.

Every float in a report is rounded to 10 significant digits when the report
is built, so both renderings print the same numbers. Wall-clock data lives in
``metadata`` and is the only part allowed to differ between identical runs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

SIG_DIGITS = 10


def fmt(x: float) -> str:
    return f"{x:.{SIG_DIGITS}g}"


def clean(obj: Any) -> Any:
    """Round floats and convert numpy containers to plain JSON-able values."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return float(fmt(x))
    return obj


@dataclass
class ReportDocument:
    command: str
    input: dict
    result: dict
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.input = clean(self.input)
        self.result = clean(self.result)
        self.metadata = clean(self.metadata)

    def to_json(self) -> str:
        doc = {"command": self.command, "input": self.input, "result": self.result,
               "metadata": self.metadata}
        return json.dumps(doc, indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"== macfeas {self.command} =="]
        _render(lines, "result", self.result, 0)
        _render(lines, "input", self.input, 0)
        _render(lines, "metadata", self.metadata, 0)
        return "\n".join(lines)


def _scalar(v: Any) -> str:
    if v is None:
        return "nan"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def _render(lines: list[str], key: str, value: Any, depth: int) -> None:
    pad = "  " * depth
    if isinstance(value, dict):
        lines.append(f"{pad}{key}:")
        for k in sorted(value):
            _render(lines, k, value[k], depth + 1)
    elif isinstance(value, list) and value and all(isinstance(v, dict) for v in value):
        cols = list(value[0].keys())
        lines.append(f"{pad}{key}:")
        table = [cols] + [[_scalar(row.get(c)) for c in cols] for row in value]
        widths = [max(len(r[j]) for r in table) for j in range(len(cols))]
        for r in table:
            lines.append(pad + "  " + "  ".join(c.rjust(w) for c, w in zip(r, widths)))
    elif isinstance(value, list):
        lines.append(f"{pad}{key}: [" + ", ".join(_scalar(v) for v in value) + "]")
    else:
        lines.append(f"{pad}{key}: {_scalar(value)}")
