"""Local read-only review endpoint with an append-only decisions log.

Serves the extraction and match outputs as JSON over localhost HTTP for
the review interface:

    GET  /records?type=&source=&offset=&limit=   paged classified records
    GET  /passages/<source_id>/<index>           passage content + spans
    GET  /decisions                              full decision log
    POST /decisions                              append an expert decision

Everything is read-only except the decisions log, which is an append-only
JSONL file; appends are serialized through a lock and flushed line-atomic,
so restarts never lose or reorder prior decisions. When a UI directory is
configured, its static files are served at the root.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .corpus import Corpus

log = logging.getLogger(__name__)

VERDICTS = ("confirmed", "rejected", "new_discovery")

_STATIC_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json",
    ".json": "application/json",
    ".svg": "image/svg+xml",
}


@dataclass
class ReviewState:
    """Immutable review data plus the append-only decisions log."""

    records: list[dict]
    corpus: Corpus | None
    decisions_path: Path
    ui_dir: Path | None = None
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    _keys: set[str] = field(default_factory=set, repr=False)

    def __post_init__(self):
        self.records = sorted(
            self.records,
            key=lambda r: (r["source_id"], r["passage_index"], r["name_span"][0],
                           r.get("dynasty", "")))
        self._keys = {r["key"] for r in self.records}

    def has_record(self, key: str) -> bool:
        return key in self._keys

    def read_decisions(self) -> list[dict]:
        if not self.decisions_path.exists():
            return []
        out = []
        with open(self.decisions_path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    out.append(json.loads(line))
        return out

    def append_decision(self, decision: dict) -> None:
        line = json.dumps(decision, ensure_ascii=False) + "\n"
        with self._lock:
            self.decisions_path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.decisions_path, "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())

    def latest_decisions(self) -> dict[str, dict]:
        latest: dict[str, dict] = {}
        for decision in self.read_decisions():
            latest[decision["key"]] = decision
        return latest


class ReviewHandler(BaseHTTPRequestHandler):
    state: ReviewState  # set on the subclass built by make_server

    def log_message(self, fmt, *args):
        log.debug("%s - %s", self.address_string(), fmt % args)

    def _send_json(self, payload, status: int = 200) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _error(self, status: int, message: str) -> None:
        self._send_json({"error": message}, status=status)

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def do_GET(self):
        url = urlparse(self.path)
        parts = [p for p in url.path.split("/") if p]
        if url.path == "/records":
            self._get_records(parse_qs(url.query))
        elif len(parts) == 3 and parts[0] == "passages":
            self._get_passage(parts[1], parts[2])
        elif url.path == "/decisions":
            self._send_json({"items": self.state.read_decisions()})
        else:
            self._get_static(url.path)

    def _get_records(self, query: dict[str, list[str]]) -> None:
        records = self.state.records
        if "type" in query:
            try:
                wanted = int(query["type"][0])
            except ValueError:
                return self._error(400, "type must be an integer")
            records = [r for r in records if r.get("type_code") == wanted]
        if "source" in query:
            wanted_source = query["source"][0]
            records = [r for r in records if r["source_id"] == wanted_source]
        try:
            offset = int(query.get("offset", ["0"])[0])
            limit = int(query.get("limit", ["50"])[0])
        except ValueError:
            return self._error(400, "offset and limit must be integers")
        if offset < 0 or limit < 1:
            return self._error(400, "offset must be >= 0 and limit >= 1")
        page = records[offset:offset + limit]
        latest = self.state.latest_decisions()
        items = [dict(r, decision=latest.get(r["key"])) for r in page]
        self._send_json({"total": len(records), "offset": offset,
                         "limit": limit, "items": items})

    def _get_passage(self, source_id: str, index_token: str) -> None:
        try:
            index = int(index_token)
        except ValueError:
            return self._error(400, "passage index must be an integer")
        corpus = self.state.corpus
        passage = corpus.get_passage(source_id, index) if corpus else None
        if passage is None:
            return self._error(404, f"unknown passage {source_id}/{index}")
        spans = []
        for r in self.state.records:
            if r["source_id"] == source_id and r["passage_index"] == index:
                spans.append({"key": r["key"], "label": "NAME",
                              "start": r["name_span"][0], "end": r["name_span"][1]})
                if r.get("style_name"):
                    start = r["name_span"][1] + 1
                    spans.append({"key": r["key"], "label": "STYLE",
                                  "start": start, "end": start + len(r["style_name"])})
        self._send_json({"source_id": source_id, "index": index,
                         "content": passage.content, "spans": spans})

    def _get_static(self, path: str) -> None:
        ui_dir = self.state.ui_dir
        if ui_dir is None:
            if path == "/":
                return self._send_json({"service": "difangzhi-miner review",
                                        "endpoints": ["/records", "/passages/<source>/<index>",
                                                      "/decisions"]})
            return self._error(404, "not found")
        name = path.lstrip("/") or "index.html"
        target = (ui_dir / name).resolve()
        if not str(target).startswith(str(ui_dir.resolve())) or not target.is_file():
            return self._error(404, "not found")
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type",
                         _STATIC_TYPES.get(target.suffix, "application/octet-stream"))
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self):
        if urlparse(self.path).path != "/decisions":
            return self._error(404, "not found")
        try:
            length = int(self.headers.get("Content-Length", "0"))
            payload = json.loads(self.rfile.read(length).decode("utf-8"))
        except (ValueError, json.JSONDecodeError):
            return self._error(400, "body must be valid JSON")
        if not isinstance(payload, dict):
            return self._error(400, "body must be a JSON object")
        key = payload.get("key")
        verdict = payload.get("verdict")
        note = payload.get("note", "")
        if not isinstance(key, str) or not key:
            return self._error(400, "missing record key")
        if verdict not in VERDICTS:
            return self._error(400, f"verdict must be one of {', '.join(VERDICTS)}")
        if not isinstance(note, str):
            return self._error(400, "note must be a string")
        if not self.state.has_record(key):
            return self._error(404, f"unknown record {key}")
        decision = {"key": key, "verdict": verdict, "note": note}
        self.state.append_decision(decision)
        self._send_json({"ok": True, "decision": decision})


def make_server(state: ReviewState, port: int,
                host: str = "127.0.0.1") -> ThreadingHTTPServer:
    handler = type("BoundReviewHandler", (ReviewHandler,), {"state": state})
    return ThreadingHTTPServer((host, port), handler)


def serve_forever(state: ReviewState, port: int) -> None:
    server = make_server(state, port)
    log.info("review endpoint on http://127.0.0.1:%d", server.server_address[1])
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
