"""JSON and CSV forms of trajectories, thresholds, sweeps, and guide curves.

Floats are rendered by Python's shortest-round-trip repr, so a written file
read back yields bit-identical numbers. Sample objects carry (t, y, v) only;
node accelerations are recomputed from the tagged equation on load.
"""

from __future__ import annotations

import json
import math
from typing import Any, Optional

import numpy as np

from .analysis import BehaviorClass, BehaviorTag, ClassifierParams, Evidence
from .equations import EquationId, acceleration_array
from .exceptions import InvalidInput
from .ode import StepControl, Trajectory, termination_from_dict
from .search import CriticalThreshold, SweepRow

__all__ = [
    "SCHEMA", "sanitize",
    "trajectory_to_dict", "trajectory_from_dict",
    "trajectory_to_json", "trajectory_from_json",
    "trajectory_to_csv", "csv_to_arrays",
    "behavior_to_dict", "behavior_from_dict",
    "threshold_to_dict", "sweep_to_dict", "regions_to_dict",
    "TRAJECTORY_JSONSCHEMA",
]

SCHEMA = "p4lab/1"


def sanitize(obj: Any) -> Any:
    """Replace non-finite floats with None, recursively; JSON has no NaN."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [sanitize(float(v)) for v in obj]
    if isinstance(obj, (np.floating,)):
        return sanitize(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _control_to_dict(c: StepControl) -> dict:
    return {"rtol": c.rtol, "atol": c.atol, "h_init": c.h_init,
            "h_min": c.h_min, "h_max": c.h_max,
            "blowup_bound": c.blowup_bound, "max_steps": c.max_steps}


def trajectory_to_dict(traj: Trajectory) -> dict:
    ic = traj.initial
    return {
        "schema": SCHEMA,
        "equation": traj.eq.value if traj.eq is not None else None,
        "ic": {"t": ic.t, "y": ic.y, "v": ic.v},
        "samples": [{"t": float(t), "y": float(y), "v": float(v)}
                    for t, y, v in zip(traj.t, traj.y, traj.v)],
        "termination": traj.termination.as_dict(),
        "control": _control_to_dict(traj.control),
    }


def trajectory_from_dict(d: dict) -> Trajectory:
    if not isinstance(d, dict) or d.get("schema") != SCHEMA:
        raise InvalidInput(f"expected schema {SCHEMA!r}, got {d.get('schema') if isinstance(d, dict) else d!r}")
    eq_tag = d.get("equation")
    if eq_tag is None:
        raise InvalidInput("cannot rebuild a trajectory with no equation tag: "
                           "node accelerations are not stored")
    eq = EquationId.parse(eq_tag)
    samples = d.get("samples")
    if not samples:
        raise InvalidInput("samples must be a nonempty list")
    t = np.asarray([s["t"] for s in samples], dtype=float)
    y = np.asarray([s["y"] for s in samples], dtype=float)
    v = np.asarray([s["v"] for s in samples], dtype=float)
    a = acceleration_array(eq, t, y, v)
    control = StepControl(**d["control"]) if "control" in d else StepControl()
    termination = termination_from_dict(d["termination"])
    return Trajectory(t=t, y=y, v=v, a=a, termination=termination,
                      eq=eq, control=control)


def trajectory_to_json(traj: Trajectory, indent: Optional[int] = None) -> str:
    return json.dumps(sanitize(trajectory_to_dict(traj)), indent=indent)


def trajectory_from_json(text: str) -> Trajectory:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"not valid JSON: {exc}") from exc
    return trajectory_from_dict(d)


def trajectory_to_csv(traj: Trajectory) -> str:
    lines = ["t,y,v"]
    lines += [f"{t!r},{y!r},{v!r}"
              for t, y, v in zip(map(float, traj.t), map(float, traj.y),
                                 map(float, traj.v))]
    return "\n".join(lines) + "\n"


def csv_to_arrays(text: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    lines = [ln for ln in text.strip().splitlines() if ln]
    if not lines or lines[0].strip() != "t,y,v":
        raise InvalidInput("expected header 't,y,v'")
    rows = [ln.split(",") for ln in lines[1:]]
    if not rows or any(len(r) != 3 for r in rows):
        raise InvalidInput("each row must have exactly 3 columns")
    data = np.asarray([[float(x) for x in r] for r in rows])
    return data[:, 0], data[:, 1], data[:, 2]


def _params_to_dict(p: ClassifierParams) -> dict:
    return {"min_crossings": p.min_crossings, "linger_dist": p.linger_dist,
            "linger_span": p.linger_span, "n_samples": p.n_samples}


def behavior_to_dict(b: BehaviorClass) -> dict:
    e = b.evidence
    return {
        "tag": b.tag.value,
        "evidence": {
            "window": list(e.window),
            "params": _params_to_dict(e.params),
            "n_samples": e.n_samples,
            "crossings_upper": e.crossings_upper,
            "crossings_lower": e.crossings_lower,
            "linger_zero_span": e.linger_zero_span,
            "linger_outer_span": e.linger_outer_span,
            "linger_outer_branch": e.linger_outer_branch,
            "blowup_t_est": e.blowup_t_est,
            "blowup_sign": e.blowup_sign,
        },
    }


def behavior_from_dict(d: dict) -> BehaviorClass:
    e = d["evidence"]
    return BehaviorClass(
        tag=BehaviorTag(d["tag"]),
        evidence=Evidence(
            window=tuple(e["window"]),
            params=ClassifierParams(**e["params"]),
            n_samples=e["n_samples"],
            crossings_upper=e["crossings_upper"],
            crossings_lower=e["crossings_lower"],
            linger_zero_span=e["linger_zero_span"],
            linger_outer_span=e["linger_outer_span"],
            linger_outer_branch=e["linger_outer_branch"],
            blowup_t_est=e["blowup_t_est"],
            blowup_sign=e["blowup_sign"],
        ),
    )


def threshold_to_dict(th: CriticalThreshold) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "threshold",
        "bracket": list(th.bracket),
        "width": th.width,
        "midpoint": th.midpoint,
        "iterations": th.iterations,
        "class_lo": behavior_to_dict(th.class_lo),
        "class_hi": behavior_to_dict(th.class_hi),
    }


def sweep_to_dict(rows: list[SweepRow]) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "sweep",
        "rows": [{
            "v0": r.v0,
            "behavior": behavior_to_dict(r.behavior),
            "termination": r.termination,
            "t_min": r.t_min,
            "t_max": r.t_max,
            "n_nodes": r.n_nodes,
        } for r in rows],
    }


def regions_to_dict(polylines: list[dict]) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "regions",
        "curves": [{"name": c["name"], "t": sanitize(c["t"]),
                    "sigma": sanitize(c["sigma"])} for c in polylines],
    }


_number = {"type": ["number", "null"]}

TRAJECTORY_JSONSCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["schema", "equation", "ic", "samples", "termination"],
    "properties": {
        "schema": {"const": SCHEMA},
        "equation": {"enum": [e.value for e in EquationId] + [None]},
        "ic": {
            "type": "object",
            "required": ["t", "y", "v"],
            "properties": {"t": _number, "y": _number, "v": _number},
        },
        "samples": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["t", "y", "v"],
                "properties": {"t": _number, "y": _number, "v": _number},
            },
        },
        "termination": {
            "type": "object",
            "required": ["kind"],
            "properties": {"kind": {"type": "string"}},
        },
        "control": {"type": "object"},
    },
}
