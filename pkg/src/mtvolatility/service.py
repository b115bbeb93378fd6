"""HTTP service hosting the annotation workflow.

Endpoints (UTF-8 JSON bodies; errors as {code, message, violated_rule?}):

  GET  /api/tasks/next?annotator=<id>[&phase=<p>]  next item or 204
  POST /api/annotations                            record body -> {revision}
  GET  /api/stats                                  aggregated statistics
  GET  /api/progress?annotator=<id>                {done, total}

Items are served blind phase first: an annotator only receives the
WithReference item of a variation after submitting its DifferenceOnly
judgment. Static files (the annotator UI) are served for non-/api paths
when a UI directory is configured.
"""

from __future__ import annotations

import json
import mimetypes
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .annotation import (
    PHASE_DIFFERENCE_ONLY,
    PHASE_WITH_REFERENCE,
    PHASES,
    AnnotationItem,
    AnnotationLog,
    AnnotationRecord,
    UnknownItemError,
    ValidationError,
    compute_stats,
)

_FALLBACK_PAGE = """<!doctype html>
<html><head><meta charset="utf-8"><title>Annotation service</title></head>
<body><h1>Annotation service is running</h1>
<p>No UI build found. Use the JSON API under <code>/api/</code> or point
the service at a built frontend with <code>--ui</code>.</p></body></html>
"""


class AnnotationService:
    """Owns the item set, the log, and the per-annotator serving order."""

    def __init__(
        self,
        items: list[AnnotationItem],
        log: AnnotationLog,
        classes: dict | None = None,
        ui_dir: str | Path | None = None,
    ):
        self.items = {item.id: item for item in items}
        self.ordered_ids = [item.id for item in items]
        self.log = log
        self.classes = classes or {}
        self.ui_dir = Path(ui_dir) if ui_dir else None

    def _done_keys(self, annotator: str) -> set[tuple[str, str]]:
        return {
            (r.item_id, r.phase)
            for r in self.log.latest()
            if r.annotator_id == annotator
        }

    def next_item(self, annotator: str, phase: str | None = None) -> AnnotationItem | None:
        """The next unannotated item for this annotator, blind phase first."""
        done = self._done_keys(annotator)
        for item_id in self.ordered_ids:
            item = self.items[item_id]
            if phase is not None and item.phase != phase:
                continue
            if (item.id, item.phase) in done:
                continue
            if item.phase == PHASE_WITH_REFERENCE:
                blind_id = f"{item.variation_id}#blind"
                if blind_id in self.items and (blind_id, PHASE_DIFFERENCE_ONLY) not in done:
                    continue
            return item
        return None

    def record(self, record: AnnotationRecord) -> int:
        if record.item_id not in self.items:
            raise UnknownItemError(record.item_id)
        item = self.items[record.item_id]
        if record.phase != item.phase:
            raise ValidationError(
                "phase", f"item {item.id} belongs to phase {item.phase}, not {record.phase}"
            )
        return self.log.append(record)

    def stats(self):
        return compute_stats(self.log.latest(), self.classes)

    def progress(self, annotator: str) -> dict:
        return {"done": len(self._done_keys(annotator)), "total": len(self.items)}


def _make_handler(service: AnnotationService):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet by default
            pass

        def _send_json(self, status: int, obj) -> None:
            body = json.dumps(obj, ensure_ascii=False).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _send_error_json(self, status: int, code: str, message: str, rule=None):
            obj = {"code": code, "message": message}
            if rule is not None:
                obj["violated_rule"] = rule
            self._send_json(status, obj)

        def _send_empty(self, status: int) -> None:
            self.send_response(status)
            self.send_header("Content-Length", "0")
            self.end_headers()

        def do_GET(self):
            url = urlparse(self.path)
            query = {k: v[0] for k, v in parse_qs(url.query).items()}
            if url.path == "/api/tasks/next":
                annotator = query.get("annotator")
                if not annotator:
                    return self._send_error_json(400, "bad_request", "annotator required")
                phase = query.get("phase")
                if phase is not None and phase not in PHASES:
                    return self._send_error_json(400, "bad_request", f"unknown phase {phase!r}")
                item = service.next_item(annotator, phase)
                if item is None:
                    return self._send_empty(204)
                return self._send_json(200, item.to_json())
            if url.path == "/api/stats":
                return self._send_json(200, service.stats().to_json())
            if url.path == "/api/progress":
                annotator = query.get("annotator")
                if not annotator:
                    return self._send_error_json(400, "bad_request", "annotator required")
                return self._send_json(200, service.progress(annotator))
            if url.path.startswith("/api/"):
                return self._send_error_json(404, "not_found", f"no route {url.path}")
            return self._serve_static(url.path)

        def do_POST(self):
            url = urlparse(self.path)
            if url.path != "/api/annotations":
                return self._send_error_json(404, "not_found", f"no route {url.path}")
            length = int(self.headers.get("Content-Length", 0))
            try:
                body = json.loads(self.rfile.read(length).decode("utf-8"))
                record = AnnotationRecord.from_json(body)
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                return self._send_error_json(400, "bad_request", f"malformed record: {exc}")
            try:
                revision = service.record(record)
            except UnknownItemError as exc:
                return self._send_error_json(404, "not_found", str(exc))
            except ValidationError as exc:
                return self._send_error_json(
                    422, "validation_error", str(exc), rule=exc.violated_rule
                )
            return self._send_json(200, {"revision": revision})

        def _serve_static(self, path: str) -> None:
            if path == "/":
                path = "/index.html"
            if service.ui_dir is not None:
                candidate = (service.ui_dir / path.lstrip("/")).resolve()
                inside = candidate.is_relative_to(service.ui_dir.resolve())
                if inside and candidate.is_file():
                    body = candidate.read_bytes()
                    ctype = mimetypes.guess_type(candidate.name)[0] or "application/octet-stream"
                    self.send_response(200)
                    self.send_header("Content-Type", ctype)
                    self.send_header("Content-Length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                    return
            if path == "/index.html":
                body = _FALLBACK_PAGE.encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "text/html; charset=utf-8")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
                return
            self._send_error_json(404, "not_found", f"no file {path}")

    return Handler


def serve(
    service: AnnotationService, host: str = "127.0.0.1", port: int = 0
) -> ThreadingHTTPServer:
    """Create the HTTP server (not yet running); port 0 picks a free port."""
    return ThreadingHTTPServer((host, port), _make_handler(service))


def serve_in_thread(service: AnnotationService, host="127.0.0.1", port=0):
    """Start the server on a daemon thread; returns (server, base_url)."""
    server = serve(service, host, port)
    thread = threading.Thread(
        target=server.serve_forever, kwargs={"poll_interval": 0.05}, daemon=True
    )
    thread.start()
    return server, f"http://{server.server_address[0]}:{server.server_address[1]}"
