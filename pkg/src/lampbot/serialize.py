"""Versioned JSON documents and content digests.

All on-disk artifacts are JSON with a `format` name and a `major.minor`
version string. Readers accept any minor revision of a known major version
and refuse anything else. Serialization uses Python's shortest-repr floats,
so values round-trip bit-exactly, and canonical dumps sort keys so repeated
runs produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import InvalidConfig, InvalidInput
from .trajectory import Annotation, State, ToolState, Trajectory, WorldState

SCENARIO_FORMAT = "lampbot.scenario"
TRAJECTORY_FORMAT = "lampbot.trajectory"
METRICS_FORMAT = "lampbot.metrics"
MAJOR_VERSION = 1
VERSION = f"{MAJOR_VERSION}.0"


def version_stamp(fmt: str) -> dict:
    return {"format": fmt, "version": VERSION}


def check_version(doc: dict, expected_format: str) -> None:
    if not isinstance(doc, dict):
        raise InvalidConfig("document must be a JSON object")
    fmt = doc.get("format")
    if fmt != expected_format:
        raise InvalidConfig(f"expected format {expected_format!r}, found {fmt!r}")
    version = str(doc.get("version", ""))
    major = version.split(".", 1)[0]
    if not major.isdigit() or int(major) != MAJOR_VERSION:
        raise InvalidConfig(
            f"unsupported {expected_format} version {version!r}; "
            f"this build reads major version {MAJOR_VERSION}"
        )


def dumps_canonical(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def save_json(path, doc: dict) -> None:
    Path(path).write_text(dumps_canonical(doc))


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"{path} is not valid JSON: {exc}") from exc


def digest_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def digest_file(path) -> str:
    return digest_bytes(Path(path).read_bytes())


def digest_doc(doc: dict) -> str:
    return digest_bytes(dumps_canonical(doc).encode())


def tool_to_dict(tool: ToolState) -> dict:
    return {
        "light_on": tool.light_on,
        "light_intensity": tool.light_intensity,
        "projector_on": tool.projector_on,
        "projected_content": tool.projected_content,
    }


def tool_from_dict(doc: dict) -> ToolState:
    if not isinstance(doc, dict):
        raise InvalidConfig("tool state must be an object")
    known = {"light_on", "light_intensity", "projector_on", "projected_content"}
    unknown = set(doc) - known
    if unknown:
        raise InvalidConfig(f"unknown tool fields: {sorted(unknown)}")
    return ToolState(
        light_on=bool(doc.get("light_on", False)),
        light_intensity=float(doc.get("light_intensity", 0.0)),
        projector_on=bool(doc.get("projector_on", False)),
        projected_content=doc.get("projected_content"),
    )


def world_to_dict(world: WorldState) -> dict:
    return {
        "user_position": [float(v) for v in world.user_position],
        "user_attention_point": (
            None
            if world.user_attention_point is None
            else [float(v) for v in world.user_attention_point]
        ),
        "objects": {
            name: [float(v) for v in pos] for name, pos in sorted(world.objects.items())
        },
        "beat_times": [float(t) for t in world.beat_times],
    }


def _point(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise InvalidConfig(f"{name} must be a finite 3-vector")
    return arr


def world_from_dict(doc: dict) -> WorldState:
    if not isinstance(doc, dict):
        raise InvalidConfig("world must be an object")
    attention = doc.get("user_attention_point")
    return WorldState(
        user_position=_point(doc.get("user_position", (0.8, 0.5, 0.4)), "user_position"),
        user_attention_point=None if attention is None else _point(attention, "user_attention_point"),
        objects={
            str(name): _point(pos, f"object {name!r}")
            for name, pos in dict(doc.get("objects", {})).items()
        },
        beat_times=[float(t) for t in doc.get("beat_times", [])],
    )


def annotation_to_dict(a: Annotation) -> dict:
    return {"start": a.start, "end": a.end, "kind": a.kind, "label": a.label}


def annotation_from_dict(doc: dict) -> Annotation:
    return Annotation(
        start=float(doc["start"]),
        end=float(doc["end"]),
        kind=str(doc["kind"]),
        label=str(doc.get("label", "")),
    )


def trajectory_to_dict(traj: Trajectory, chain_id: str, meta: dict | None = None) -> dict:
    """Full trajectory document. The world appears once in the header; the
    per-sample world reference is shared, not per-sample state."""
    world = None
    for s in traj.samples:
        if s.world is not None:
            world = s.world
            break
    doc = version_stamp(TRAJECTORY_FORMAT)
    doc["chain"] = chain_id
    doc["dt"] = traj.dt
    doc["meta"] = dict(meta or {})
    doc["world"] = None if world is None else world_to_dict(world)
    doc["samples"] = [
        {
            "t": i * traj.dt,
            "q": [float(v) for v in s.q],
            "tool": tool_to_dict(s.tool),
        }
        for i, s in enumerate(traj.samples)
    ]
    doc["annotations"] = [annotation_to_dict(a) for a in traj.annotations]
    return doc


def trajectory_from_dict(doc: dict) -> Trajectory:
    check_version(doc, TRAJECTORY_FORMAT)
    dt = float(doc.get("dt", 0.0))
    if dt <= 0:
        raise InvalidConfig("dt must be positive")
    world = None if doc.get("world") is None else world_from_dict(doc["world"])
    samples = []
    for row in doc.get("samples", []):
        q = np.asarray(row["q"], dtype=float)
        samples.append(State(q=q, tool=tool_from_dict(row.get("tool", {})), world=world))
    if not samples:
        raise InvalidConfig("trajectory has no samples")
    annotations = [annotation_from_dict(a) for a in doc.get("annotations", [])]
    return Trajectory(dt=dt, samples=samples, annotations=annotations)
