"""JSON parameter ingestion.

A config document mirrors the EngineParams / DrivingSpec field names, either
nested under "engine" / "driving" keys or flat.  Missing entries fall back
to the baseline defaults.  The engine shorthand "r" sets all four
system-reservoir couplings at once, and the driving extras "te_rel" /
"center_rel" are interpreted in units of the period t_p.
"""

from __future__ import annotations

import dataclasses
import json
import math
from pathlib import Path

from .model import DrivingSpec, EngineParams, ModelError

_ENGINE_FIELDS = {f.name for f in dataclasses.fields(EngineParams)}
_DRIVING_FIELDS = {f.name for f in dataclasses.fields(DrivingSpec)}


def _engine_from(mapping) -> EngineParams:
    kw = {k: v for k, v in mapping.items() if k in _ENGINE_FIELDS}
    extra = set(mapping) - _ENGINE_FIELDS - {"r"}
    if extra:
        raise ModelError(f"unknown engine fields: {sorted(extra)}")
    if "r" in mapping:
        for name in ("r1h", "r2h", "r1c", "r2c"):
            kw.setdefault(name, float(mapping["r"]))
    return EngineParams(**kw)


def _driving_from(mapping) -> DrivingSpec:
    kw = {k: v for k, v in mapping.items() if k in _DRIVING_FIELDS}
    extra = set(mapping) - _DRIVING_FIELDS - {"te_rel", "center_rel"}
    if extra:
        raise ModelError(f"unknown driving fields: {sorted(extra)}")
    omega = float(kw.get("omega", DrivingSpec.omega))
    t_p = 2.0 * math.pi / omega
    if "te_rel" in mapping:
        kw["te"] = float(mapping["te_rel"]) * t_p
    if "center_rel" in mapping:
        kw["center"] = float(mapping["center_rel"]) * t_p
    return DrivingSpec(**kw)


def load_config(source) -> tuple[EngineParams, DrivingSpec, dict]:
    """(EngineParams, DrivingSpec, remaining document) from a path or dict."""
    if isinstance(source, (str, Path)):
        doc = json.loads(Path(source).read_text())
    elif source is None:
        doc = {}
    else:
        doc = dict(source)
    if "engine" in doc or "driving" in doc:
        engine = _engine_from(doc.get("engine", {}))
        driving = _driving_from(doc.get("driving", {}))
        rest = {k: v for k, v in doc.items() if k not in ("engine", "driving")}
    else:
        engine_part = {k: v for k, v in doc.items() if k in _ENGINE_FIELDS or k == "r"}
        driving_part = {k: v for k, v in doc.items()
                        if k in _DRIVING_FIELDS or k in ("te_rel", "center_rel")}
        engine = _engine_from(engine_part)
        driving = _driving_from(driving_part)
        rest = {k: v for k, v in doc.items()
                if k not in engine_part and k not in driving_part}
    return engine, driving, rest
