"""Local HTTP endpoint the studio talks to.

Stateless JSON-over-HTTP on the loopback interface by default. Planning
requests run through the same payload builder as the file-writing CLI, so
a response body and a written file never disagree. Responses additionally
carry per-sample chain geometry so clients can render playback without
doing any kinematics of their own.
"""

from __future__ import annotations

import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np

from .errors import (
    Infeasible,
    InvalidConfig,
    InvalidInput,
    LampbotError,
    TargetMissing,
    UnknownScenario,
    Unreachable,
)
from .kinematics import ChainSpec, batch_head_poses, chain_points, default_chain
from .primitives import ANCHORS, PARAM_SCHEMAS
from .scenarios import load_scenario, list_scenarios
from .serialize import dumps_canonical
from .trajectory import Trajectory

MAX_BODY_BYTES = 1 << 20

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json; charset=utf-8",
    ".svg": "image/svg+xml",
    ".map": "application/json; charset=utf-8",
    ".ico": "image/x-icon",
}


def catalog_doc() -> dict:
    """Primitive schemas in JSON form, for client-side validation."""
    kinds = {}
    for kind, schema in sorted(PARAM_SCHEMAS.items()):
        params = {}
        for name, (type_name, default, low, high) in schema.items():
            params[name] = {
                "type": type_name,
                "default": default,
                "low": low,
                "high": high,
                "required": default is None,
            }
        kinds[kind] = params
    return {"kinds": kinds, "anchors": list(ANCHORS)}


def scenario_descriptors(chain: ChainSpec) -> list:
    rows = []
    for name in list_scenarios():
        task = load_scenario(name, chain)
        rows.append(
            {
                "id": task.id,
                "title": task.title,
                "orientation": task.orientation,
                "agency": task.agency,
                "description": task.description,
                "goal_kind": task.goal_kind,
                "epsilon": task.epsilon,
                "beat_align": task.beat_align,
                "expression_weights": dict(task.expression.weights) if task.expression else {},
                "scripted_plan": [
                    {"kind": p.kind, "params": dict(p.params), "anchor": p.anchor}
                    for p in task.scripted_plan
                ],
                "world": {
                    "user_position": [float(v) for v in task.world.user_position],
                    "objects": {
                        k: [float(x) for x in v] for k, v in sorted(task.world.objects.items())
                    },
                    "beat_times": [float(b) for b in task.world.beat_times],
                },
            }
        )
    return rows


def render_geometry(chain: ChainSpec, trajectory: Trajectory) -> dict:
    """Per-sample link points and head facing vectors for playback."""
    Q = trajectory.joint_array()
    points = np.stack([chain_points(chain, q) for q in Q])
    _, facings = batch_head_poses(chain, Q)
    return {
        "times": [float(t) for t in trajectory.times()],
        "links": points.tolist(),
        "facings": facings.tolist(),
        "tools": [
            {
                "light_on": s.tool.light_on,
                "light_intensity": s.tool.light_intensity,
                "projector_on": s.tool.projector_on,
                "projected_content": s.tool.projected_content,
            }
            for s in trajectory.samples
        ],
        "annotations": [
            {"start": a.start, "end": a.end, "kind": a.kind, "label": a.label}
            for a in trajectory.annotations
        ],
    }


def handle_plan_request(chain: ChainSpec, body: dict) -> dict:
    from .cli import plan_payload
    from .serialize import trajectory_from_dict

    if not isinstance(body, dict):
        raise InvalidInput("request body must be a JSON object")
    unknown = set(body) - {
        "scenario",
        "variant",
        "gamma",
        "seed",
        "mode",
        "search",
        "overrides",
    }
    if unknown:
        raise InvalidInput(f"unknown request fields: {sorted(unknown)}")
    if "scenario" not in body:
        raise InvalidInput("request needs a scenario id")
    try:
        gamma = float(body.get("gamma", 1.0))
        seed = int(body.get("seed", 0))
    except (TypeError, ValueError) as exc:
        raise InvalidInput("gamma must be a number and seed an integer") from exc

    task = load_scenario(str(body["scenario"]), chain)
    request = {
        "scenario": task.id,
        "variant": str(body.get("variant", "E")),
        "gamma": gamma,
        "seed": seed,
        "mode": str(body.get("mode", "scripted")),
        "search": str(body.get("search", "beam")),
        "overrides": body.get("overrides") or [],
    }
    trajectory_doc, metrics_doc = plan_payload(
        chain,
        task,
        variant=request["variant"],
        gamma=gamma,
        seed=seed,
        mode=request["mode"],
        search=request["search"],
        overrides=request["overrides"],
    )
    trajectory = trajectory_from_dict(trajectory_doc)
    return {
        "request": request,
        "digest": metrics_doc["trajectory_digest"],
        "trajectory": trajectory_doc,
        "metrics": metrics_doc,
        "render": render_geometry(chain, trajectory),
    }


ERROR_CODES = (
    (InvalidInput, "invalid_input"),
    (InvalidConfig, "invalid_config"),
    (UnknownScenario, "unknown_scenario"),
    (TargetMissing, "target_missing"),
    (Infeasible, "infeasible"),
    (Unreachable, "unreachable"),
)


def error_code(exc: Exception) -> str:
    for cls, code in ERROR_CODES:
        if isinstance(exc, cls):
            return code
    return "error"


class StudioHandler(BaseHTTPRequestHandler):
    server_version = "lampbot-serve/1.0"
    chain: ChainSpec = None
    static_dir: Path | None = None

    def log_message(self, fmt, *args):  # quiet by default; it is a local tool
        pass

    def _send(self, status: int, payload: dict) -> None:
        blob = dumps_canonical(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(blob)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Cache-Control", "no-store")
        self.end_headers()
        self.wfile.write(blob)

    def _send_error(self, status: int, exc: Exception) -> None:
        self._send(status, {"error": {"code": error_code(exc), "message": str(exc)}})

    def _send_file(self, path: Path) -> None:
        blob = path.read_bytes()
        self.send_response(200)
        ctype = _CONTENT_TYPES.get(path.suffix.lower(), "application/octet-stream")
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(blob)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(blob)

    def _static_lookup(self, raw: str) -> Path | None:
        if self.static_dir is None:
            return None
        root = self.static_dir.resolve()
        relative = raw.split("?", 1)[0].lstrip("/") or "index.html"
        candidate = (root / relative).resolve()
        if root not in candidate.parents and candidate != root:
            return None
        if candidate.is_dir():
            candidate = candidate / "index.html"
        return candidate if candidate.is_file() else None

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def do_GET(self):
        path = self.path.split("?", 1)[0]
        try:
            if path == "/scenarios":
                self._send(200, {"scenarios": scenario_descriptors(self.chain)})
            elif path == "/catalog":
                self._send(200, catalog_doc())
            elif path == "/health":
                self._send(200, {"ok": True, "chain": self.chain.id})
            else:
                static = self._static_lookup(self.path)
                if static is not None:
                    self._send_file(static)
                else:
                    self._send(404, {"error": {"code": "not_found", "message": path}})
        except LampbotError as exc:
            self._send_error(400, exc)

    def do_POST(self):
        if self.path.split("?", 1)[0] != "/plan":
            self._send(404, {"error": {"code": "not_found", "message": self.path}})
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            if length <= 0 or length > MAX_BODY_BYTES:
                raise InvalidInput("request body missing or too large")
            body = json.loads(self.rfile.read(length).decode("utf-8"))
        except (ValueError, UnicodeDecodeError) as exc:
            self._send_error(400, InvalidInput(f"malformed JSON body: {exc}"))
            return
        try:
            self._send(200, handle_plan_request(self.chain, body))
        except UnknownScenario as exc:
            self._send_error(404, exc)
        except LampbotError as exc:
            self._send_error(400, exc)


def make_server(host: str, port: int, chain: ChainSpec | None = None, static_dir=None):
    handler = type(
        "BoundStudioHandler",
        (StudioHandler,),
        {
            "chain": chain or default_chain(),
            "static_dir": Path(static_dir) if static_dir else None,
        },
    )
    return ThreadingHTTPServer((host, port), handler)


def run_server(host: str, port: int, chain: ChainSpec | None = None, static_dir=None) -> None:
    server = make_server(host, port, chain, static_dir)
    print(f"serving on http://{host}:{port} (chain {server.RequestHandlerClass.chain.id})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
