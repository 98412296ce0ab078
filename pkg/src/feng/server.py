"""HTTP API over a session for the review dashboard.

Endpoints (JSON):
    GET  /api/session                      config + baseline
    GET  /api/iterations                   finished iteration records, in order
    GET  /api/iterations/{i}               one record
    GET  /api/events?after=n               long-poll for events with seq > n
    POST /api/iterations/{i}/decision      {"accept": bool, "note"?: str}
    POST /api/description                  {"text": str}, used from next iteration
Static files are served at / from the configured UI directory.

The server never mutates session state except through the decision endpoint;
a posted decision unblocks the engine loop waiting in review mode.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .engine import ApiEvent, DescriptionHolder


class SessionHost:
    """Shared state between the engine thread and HTTP handlers."""

    def __init__(self, config: dict, description: str = "", poll_timeout: float = 25.0):
        self.config = config
        self.baseline: dict | None = None
        self.records: list[dict] = []
        self.events: list[dict] = []
        self.description_holder = DescriptionHolder(description)
        self.poll_timeout = poll_timeout
        self.finished = False
        self.error: str | None = None
        self._cond = threading.Condition()
        self._awaiting: dict | None = None  # snapshot of the undecided candidate
        self._decision: tuple[bool, str | None] | None = None

    # engine-side ------------------------------------------------------------

    def on_event(self, event: ApiEvent) -> None:
        with self._cond:
            self.events.append(event.to_dict())
            if event.kind == "iteration_finished":
                self.records.append(event.payload)
            if event.kind == "session_finished":
                self.finished = True
            self._cond.notify_all()

    def decide(self, snapshot: dict) -> tuple[bool, str | None]:
        with self._cond:
            self._awaiting = snapshot
            self._decision = None
            self._cond.notify_all()
            while self._decision is None:
                self._cond.wait()
            decision = self._decision
            self._awaiting = None
            self._decision = None
            self._cond.notify_all()
            return decision

    def mark_failed(self, message: str) -> None:
        with self._cond:
            self.error = message
            self.finished = True
            self._cond.notify_all()

    # handler-side -----------------------------------------------------------

    def submit_decision(self, iteration: int, accept: bool, note: str | None) -> bool:
        """True if delivered; False when no matching candidate awaits (stale)."""
        with self._cond:
            if self._awaiting is None or self._awaiting.get("index") != iteration:
                return False
            self._decision = (bool(accept), note)
            self._cond.notify_all()
            return True

    def events_after(self, cursor: int) -> list[dict]:
        with self._cond:
            if not any(e["seq"] > cursor for e in self.events) and not self.finished:
                self._cond.wait(timeout=self.poll_timeout)
            return [e for e in self.events if e["seq"] > cursor]

    def snapshot_records(self) -> list[dict]:
        with self._cond:
            return list(self.records)


def load_finished_session(session_dir: str | Path) -> SessionHost:
    """Host a completed session directory for read-only browsing."""
    out = Path(session_dir)
    config = json.loads((out / "config.json").read_text(encoding="utf-8"))
    host = SessionHost(config)
    host.baseline = json.loads((out / "baseline.json").read_text(encoding="utf-8"))
    iter_dir = out / "iterations"
    if iter_dir.is_dir():
        seq = 0
        for p in sorted(iter_dir.glob("*.json")):
            record = json.loads(p.read_text(encoding="utf-8"))
            host.records.append(record)
            host.events.append(
                ApiEvent(seq, "iteration_finished", record["index"], record).to_dict()
            )
            seq += 1
        host.events.append(
            ApiEvent(seq, "session_finished", len(host.records) - 1, {}).to_dict()
        )
    host.finished = True
    return host


class _Handler(BaseHTTPRequestHandler):
    host: SessionHost = None  # set by make_server
    ui_dir: Path | None = None

    def log_message(self, fmt, *args):  # tests stay quiet
        pass

    def _send_json(self, obj, status: int = 200) -> None:
        body = json.dumps(obj).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _read_json(self):
        length = int(self.headers.get("Content-Length", 0))
        raw = self.rfile.read(length) if length else b"{}"
        try:
            return json.loads(raw)
        except ValueError:
            return None

    def do_GET(self):
        url = urlparse(self.path)
        if url.path == "/api/session":
            self._send_json(
                {
                    "config": self.host.config,
                    "baseline": self.host.baseline,
                    "finished": self.host.finished,
                    "error": self.host.error,
                }
            )
            return
        if url.path == "/api/iterations":
            self._send_json(self.host.snapshot_records())
            return
        if url.path.startswith("/api/iterations/"):
            tail = url.path.rsplit("/", 1)[1]
            records = self.host.snapshot_records()
            if not tail.isdigit() or int(tail) >= len(records):
                self._send_json({"error": "unknown iteration"}, 404)
                return
            self._send_json(records[int(tail)])
            return
        if url.path == "/api/events":
            params = parse_qs(url.query)
            after = int(params.get("after", ["-1"])[0])
            self._send_json({"events": self.host.events_after(after)})
            return
        self._serve_static(url.path)

    def do_POST(self):
        url = urlparse(self.path)
        if url.path == "/api/description":
            body = self._read_json()
            if body is None or not isinstance(body.get("text"), str):
                self._send_json({"error": "expected {\"text\": str}"}, 400)
                return
            self.host.description_holder.text = body["text"]
            self._send_json({"ok": True})
            return
        if url.path.startswith("/api/iterations/") and url.path.endswith("/decision"):
            parts = url.path.split("/")
            if len(parts) != 5 or not parts[3].isdigit():
                self._send_json({"error": "bad iteration index"}, 404)
                return
            body = self._read_json()
            if body is None or not isinstance(body.get("accept"), bool):
                self._send_json({"error": "expected {\"accept\": bool}"}, 400)
                return
            delivered = self.host.submit_decision(
                int(parts[3]), body["accept"], body.get("note")
            )
            if not delivered:
                self._send_json({"error": "stale decision: no such candidate awaits"}, 409)
                return
            self._send_json({"ok": True})
            return
        self._send_json({"error": "not found"}, 404)

    _CONTENT_TYPES = {
        ".html": "text/html; charset=utf-8",
        ".js": "text/javascript; charset=utf-8",
        ".css": "text/css; charset=utf-8",
        ".map": "application/json",
        ".svg": "image/svg+xml",
    }

    def _serve_static(self, path: str) -> None:
        if self.ui_dir is None:
            if path in ("/", "/index.html"):
                body = b"<html><body><p>feng session API. UI bundle not configured.</p></body></html>"
                self.send_response(200)
                self.send_header("Content-Type", "text/html; charset=utf-8")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
                return
            self._send_json({"error": "not found"}, 404)
            return
        rel = "index.html" if path == "/" else path.lstrip("/")
        target = (self.ui_dir / rel).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) or not target.is_file():
            self._send_json({"error": "not found"}, 404)
            return
        body = target.read_bytes()
        self.send_response(200)
        ctype = self._CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


def make_server(
    host_state: SessionHost,
    bind: str = "127.0.0.1",
    port: int = 0,
    ui_dir: str | Path | None = None,
) -> ThreadingHTTPServer:
    handler = type(
        "BoundHandler",
        (_Handler,),
        {"host": host_state, "ui_dir": Path(ui_dir) if ui_dir else None},
    )
    return ThreadingHTTPServer((bind, port), handler)
