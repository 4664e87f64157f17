"""JSON-friendly conversion for the report dataclasses."""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np


def to_jsonable(obj):
    """Recursively convert dataclasses, numpy scalars and arrays to plain JSON types."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "to_dict"):
            return obj.to_dict()
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if math.isfinite(value) else str(value)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


class ReportMixin:
    """Adds ``to_dict``/``to_json`` to a dataclass."""

    def to_dict(self) -> dict:
        return {
            f.name: to_jsonable(getattr(self, f.name))
            for f in dataclasses.fields(self)
            if not f.name.startswith("_")
        }

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("indent", 2)
        return json.dumps(self.to_dict(), **kwargs)


@dataclasses.dataclass
class DiagnosticsReport(ReportMixin):
    """Estimated constants together with the windows they were measured on."""

    name: str
    passed: bool
    constants: dict
    window: int
    details: dict = dataclasses.field(default_factory=dict)
    offending: list = dataclasses.field(default_factory=list)
