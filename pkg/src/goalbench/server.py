"""Read-only HTTP/JSON service exposing the engine to scripts and the what-if UI.

The loaded model is immutable shared state; every response is canonical JSON,
so identical requests yield byte-identical bodies. Scenario problems map to
400, domain violations to 422.
"""

from __future__ import annotations

import json
import os
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Any, Mapping
from urllib.parse import parse_qs, urlsplit

from . import reuse, uncertainty, valuation
from .layout import layout_graph
from .model import (
    DomainError,
    EvaluationError,
    GoalGraph,
    ModelError,
    ScenarioError,
    canonical_json,
    canonical_serialize,
    validate,
)
from .propagation import build_scenario, propagate, whatif_diff

DEFAULT_BIND = "127.0.0.1:8347"
BIND_ENV_VAR = "GOALBENCH_BIND"

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json; charset=utf-8",
    ".svg": "image/svg+xml",
    ".map": "application/json; charset=utf-8",
    ".ico": "image/x-icon",
}

_INDEX_FALLBACK = """<!DOCTYPE html>
<html><head><meta charset="utf-8"><title>goalbench service</title></head>
<body><h1>goalbench analysis service</h1>
<p>No UI assets configured (start with --ui DIR to serve the what-if explorer).</p>
<ul>
<li>GET /api/model</li>
<li>GET /api/layout</li>
<li>POST /api/propagate {"profile", "assignments"}</li>
<li>POST /api/whatif {"base", "changed"}</li>
<li>POST /api/montecarlo {"profile", "assignments", "runs", "seed"}</li>
<li>GET /api/duplicates?threshold=0.8</li>
<li>GET /api/utility?profile=P&amp;assignments=T1=ToBe</li>
</ul></body></html>
"""


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code


def _expect_mapping(value: Any, name: str) -> Mapping[str, Any]:
    if not isinstance(value, dict):
        raise ServiceError(400, "invalid-request", f"'{name}' must be a JSON object")
    return value


def _expect_int(value: Any, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ServiceError(400, "invalid-request", f"'{name}' must be an integer")
    return value


class EngineService:
    """Pure request->canonical-bytes mapping over one immutable graph."""

    def __init__(self, graph: GoalGraph, ui_dir: str | None = None):
        self.graph = graph
        self.ui_dir = Path(ui_dir).resolve() if ui_dir else None
        self.model_bytes = canonical_serialize(graph).encode("utf-8")
        self.layout_bytes = canonical_json(layout_graph(graph).to_dict()).encode("utf-8")

    # -- scenario plumbing -------------------------------------------------

    def _scenario(self, payload: Mapping[str, Any]):
        profile = payload.get("profile")
        if not isinstance(profile, str):
            raise ServiceError(400, "invalid-scenario", "'profile' must be a string")
        assignments = payload.get("assignments", {})
        if not isinstance(assignments, dict):
            raise ServiceError(400, "invalid-scenario", "'assignments' must be an object")
        try:
            return build_scenario(self.graph, profile, assignments)
        except ScenarioError as exc:
            raise ServiceError(400, "invalid-scenario", str(exc)) from None
        except DomainError as exc:
            raise ServiceError(422, "domain-violation", str(exc)) from None

    # -- endpoints ----------------------------------------------------------

    def propagate(self, payload: Mapping[str, Any]) -> bytes:
        result = propagate(self.graph, self._scenario(payload))
        return canonical_serialize(result).encode("utf-8")

    def whatif(self, payload: Mapping[str, Any]) -> bytes:
        base = self._scenario(_expect_mapping(payload.get("base"), "base"))
        changed = self._scenario(_expect_mapping(payload.get("changed"), "changed"))
        return canonical_serialize(whatif_diff(self.graph, base, changed)).encode("utf-8")

    def montecarlo(self, payload: Mapping[str, Any]) -> bytes:
        scenario = self._scenario(payload)
        runs = _expect_int(payload.get("runs"), "runs")
        seed = _expect_int(payload.get("seed", 0), "seed")
        try:
            summary = uncertainty.monte_carlo(self.graph, scenario, runs, seed)
        except DomainError as exc:
            raise ServiceError(422, "domain-violation", str(exc)) from None
        return canonical_serialize(summary).encode("utf-8")

    def duplicates(self, query: Mapping[str, list[str]]) -> bytes:
        raw = query.get("threshold", [str(reuse.DEFAULT_DUPLICATE_THRESHOLD)])[0]
        try:
            threshold = float(raw)
        except ValueError:
            raise ServiceError(400, "invalid-request", f"threshold {raw!r} is not a number") from None
        try:
            scores = reuse.find_duplicates([self.graph], threshold)
        except DomainError as exc:
            raise ServiceError(422, "domain-violation", str(exc)) from None
        report = {"threshold": threshold, "pairs": [s.to_dict() for s in scores]}
        return canonical_json(report).encode("utf-8")

    def utility(self, query: Mapping[str, list[str]]) -> bytes:
        profile = query.get("profile", [None])[0]
        if profile is None:
            profiles = self.graph.profile_ids()
            if len(profiles) != 1:
                raise ServiceError(400, "invalid-scenario", "profile query parameter required")
            profile = profiles[0]
        assignments: dict[str, Any] = {}
        for chunk in query.get("assignments", []):
            for pair in chunk.split(","):
                if not pair:
                    continue
                if "=" not in pair:
                    raise ServiceError(
                        400, "invalid-request", f"assignment {pair!r} is not TASK=VALUE"
                    )
                task_id, value = pair.split("=", 1)
                try:
                    assignments[task_id] = float(value)
                except ValueError:
                    assignments[task_id] = value
        scenario = self._scenario({"profile": profile, "assignments": assignments})
        try:
            result = valuation.scenario_utility(self.graph, scenario)
        except ScenarioError as exc:
            raise ServiceError(400, "invalid-scenario", str(exc)) from None
        except DomainError as exc:
            raise ServiceError(422, "domain-violation", str(exc)) from None
        return canonical_serialize(result).encode("utf-8")

    # -- static UI -----------------------------------------------------------

    def static_file(self, path: str) -> tuple[bytes, str] | None:
        if self.ui_dir is None:
            if path in ("/", "/index.html"):
                return _INDEX_FALLBACK.encode("utf-8"), "text/html; charset=utf-8"
            return None
        relative = path.lstrip("/") or "index.html"
        target = (self.ui_dir / relative).resolve()
        if not str(target).startswith(str(self.ui_dir)) or not target.is_file():
            return None
        content_type = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        return target.read_bytes(), content_type


class _Handler(BaseHTTPRequestHandler):
    service: EngineService  # injected by create_server
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt: str, *args: Any) -> None:
        if os.environ.get("GOALBENCH_HTTP_LOG"):
            super().log_message(fmt, *args)

    def _send(self, status: int, body: bytes, content_type: str = "application/json; charset=utf-8") -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _send_error_body(self, status: int, code: str, message: str) -> None:
        body = canonical_json({"error": {"code": code, "message": message}}).encode("utf-8")
        self._send(status, body)

    def _read_json(self) -> Mapping[str, Any]:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        try:
            payload = json.loads(raw.decode("utf-8") or "{}")
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            raise ServiceError(400, "invalid-request", f"malformed JSON body: {exc}") from None
        return _expect_mapping(payload, "body")

    def do_OPTIONS(self) -> None:  # noqa: N802 - http.server naming
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self) -> None:  # noqa: N802
        url = urlsplit(self.path)
        query = parse_qs(url.query)
        try:
            if url.path == "/api/model":
                self._send(200, self.service.model_bytes)
            elif url.path == "/api/layout":
                self._send(200, self.service.layout_bytes)
            elif url.path == "/api/duplicates":
                self._send(200, self.service.duplicates(query))
            elif url.path == "/api/utility":
                self._send(200, self.service.utility(query))
            elif url.path.startswith("/api/"):
                self._send_error_body(404, "not-found", f"no such endpoint: {url.path}")
            else:
                static = self.service.static_file(url.path)
                if static is None:
                    self._send_error_body(404, "not-found", f"no such path: {url.path}")
                else:
                    body, content_type = static
                    self._send(200, body, content_type)
        except ServiceError as exc:
            self._send_error_body(exc.status, exc.code, str(exc))
        except (EvaluationError, ModelError) as exc:
            self._send_error_body(422, "evaluation-failed", str(exc))

    def do_POST(self) -> None:  # noqa: N802
        url = urlsplit(self.path)
        try:
            payload = self._read_json()
            if url.path == "/api/propagate":
                self._send(200, self.service.propagate(payload))
            elif url.path == "/api/whatif":
                self._send(200, self.service.whatif(payload))
            elif url.path == "/api/montecarlo":
                self._send(200, self.service.montecarlo(payload))
            else:
                self._send_error_body(404, "not-found", f"no such endpoint: {url.path}")
        except ServiceError as exc:
            self._send_error_body(exc.status, exc.code, str(exc))
        except (EvaluationError, ModelError) as exc:
            self._send_error_body(422, "evaluation-failed", str(exc))


def parse_bind(bind: str | None) -> tuple[str, int]:
    chosen = bind or os.environ.get(BIND_ENV_VAR) or DEFAULT_BIND
    host, _, port_text = chosen.rpartition(":")
    if not host or not port_text.isdigit():
        raise ScenarioError(f"bind address must be HOST:PORT, got {chosen!r}")
    return host, int(port_text)


def create_server(
    graph: GoalGraph,
    host: str = "127.0.0.1",
    port: int = 8347,
    ui_dir: str | None = None,
) -> ThreadingHTTPServer:
    """Build (but do not start) the service; the model must be ERROR-free."""
    report = validate(graph)
    if not report.ok:
        details = "; ".join(f"{f.rule}@{f.subject}" for f in report.errors)
        raise ModelError(f"model has validation errors: {details}")
    service = EngineService(graph, ui_dir)
    handler = type("GoalbenchHandler", (_Handler,), {"service": service})
    return ThreadingHTTPServer((host, port), handler)


def serve(
    graph: GoalGraph,
    bind: str | None = None,
    ui_dir: str | None = None,
    model_name: str = "model",
) -> None:
    """Run the service until interrupted; prints the resolved address first."""
    host, port = parse_bind(bind)
    server = create_server(graph, host, port, ui_dir)
    actual_host, actual_port = server.server_address[0], server.server_address[1]
    print(f"goalbench: serving {model_name} on http://{actual_host}:{actual_port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()


def start_background(server: ThreadingHTTPServer) -> threading.Thread:
    """Start serve_forever on a daemon thread (used by embedding tests/tools)."""
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return thread
