"""Run reports: comparisons with tolerances, JSON and CSV serialisation.

Floats are written with 17 significant digits so regression fixtures
round-trip exactly; complex numbers become ``{"re": ..., "im": ...}``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Optional

import numpy as np

__all__ = ["Check", "RunReport", "to_json", "to_csv", "load_schema", "jsonable"]


@dataclass
class Check:
    """One comparison ``value`` against ``reference``.

    ``mode`` is ``"abs"`` (``|v - r| <= tol``), ``"rel"``
    (``|v - r| <= tol * |r|``), ``"le"`` (``v <= r + tol``) or ``"lt"``
    (``v < r``, tolerance unused but recorded as 0).
    """

    name: str
    value: Any
    reference: Any
    tolerance: float
    mode: str = "abs"
    passed: bool = field(init=False)

    def __post_init__(self):
        v, r, tol = self.value, self.reference, self.tolerance
        if self.mode == "abs":
            ok = abs(v - r) <= tol
        elif self.mode == "rel":
            ok = abs(v - r) <= tol * abs(r)
        elif self.mode == "le":
            ok = v <= r + tol
        elif self.mode == "lt":
            ok = v < r
        else:
            raise ValueError(f"unknown comparison mode {self.mode!r}")
        self.passed = bool(ok)

    def as_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "reference": self.reference,
                "tolerance": self.tolerance, "mode": self.mode, "passed": self.passed}


@dataclass
class RunReport:
    command: str
    version: str
    inputs: dict
    results: dict
    checks: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    verify: bool = False
    duration_s: float = 0.0
    rows: Optional[list] = None
    columns: Optional[list] = None

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def status(self) -> str:
        if self.verify and not self.all_passed:
            return "tolerance-failure"
        return "ok"

    def as_dict(self) -> dict:
        out = {
            "schema_version": 1,
            "command": self.command,
            "version": self.version,
            "inputs": self.inputs,
            "results": self.results,
            "checks": [c.as_dict() for c in self.checks],
            "diagnostics": self.diagnostics,
            "verify": self.verify,
            "status": self.status,
            "duration_s": self.duration_s,
        }
        if self.rows is not None:
            out["columns"] = self.columns
            out["rows"] = [dict(zip(self.columns, r)) for r in self.rows]
        return out


def jsonable(obj):
    """Convert numpy scalars, complex numbers and tuples to plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    return obj


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialise non-finite value {x!r}")
    return format(x, ".17g")


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, float):
        return _fmt_float(obj)
    return json.dumps(obj)


def to_json(report: RunReport, indent: int = 2) -> str:
    return _encode(jsonable(report.as_dict()), indent, 0) + "\n"


def _csv_cell(v) -> str:
    v = jsonable(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _fmt_float(v)
    return str(v)


def to_csv(report: RunReport) -> str:
    if report.rows is None:
        raise ValueError(f"command {report.command!r} produces no table")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def load_schema() -> dict:
    text = resources.files("hsext").joinpath("schema/report.schema.json").read_text("utf-8")
    return json.loads(text)
