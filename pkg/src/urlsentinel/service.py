"""Low-latency HTTP prediction service over a loaded model bundle.

Endpoints (JSON, UTF-8, permissive CORS for the web console):
  GET  /health          -> {status, model_version}; 503 until a model is set
  POST /classify        -> {url} in, PredictionResult out
  POST /classify/batch  -> {urls: [... <= 1000]} in, array out; 413 oversize
  GET  /model/info      -> bundle metadata and metric snapshot

The model reference is swapped atomically; concurrent requests only ever see
a whole bundle, old or new. Internal failures answer 500, never a crash.
"""

from __future__ import annotations

import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .errors import DegenerateInputError
from .model_store import ModelBundle
from .pipeline import classify_url

log = logging.getLogger(__name__)

MAX_BATCH = 1000


class PredictionServer:
    """Threaded HTTP server wrapper with atomic model hot-swap."""

    def __init__(
        self,
        bundle: ModelBundle | None,
        host: str = "127.0.0.1",
        port: int = 8080,
        worker_count: int = 8,
    ):
        self._bundle = bundle
        self._gate = threading.BoundedSemaphore(worker_count)
        handler = _make_handler(self)
        self._httpd = ThreadingHTTPServer((host, port), handler)
        self._httpd.daemon_threads = True
        self._thread: threading.Thread | None = None

    @property
    def bundle(self) -> ModelBundle | None:
        return self._bundle

    def set_bundle(self, bundle: ModelBundle) -> None:
        self._bundle = bundle  # attribute swap is atomic under the GIL

    @property
    def address(self) -> tuple[str, int]:
        return self._httpd.server_address[:2]

    def start(self) -> "PredictionServer":
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        host, port = self.address
        log.info("prediction service listening on %s:%d", host, port)
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)

    def serve_forever(self) -> None:
        self._httpd.serve_forever()


def _make_handler(server: PredictionServer):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):
            log.debug("http: " + fmt, *args)

        def _send(self, status: int, payload) -> None:
            body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.end_headers()
            self.wfile.write(body)

        def _read_json(self):
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length) if length else b""
            if not raw:
                raise ValueError("empty request body")
            return json.loads(raw.decode("utf-8"))

        def do_OPTIONS(self):
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Content-Length", "0")
            self.end_headers()

        def do_GET(self):
            with server._gate:
                try:
                    self._route_get()
                except Exception:
                    log.exception("GET %s failed", self.path)
                    self._send(500, {"error": "internal error"})

        def do_POST(self):
            with server._gate:
                try:
                    self._route_post()
                except Exception:
                    log.exception("POST %s failed", self.path)
                    self._send(500, {"error": "internal error"})

        def _route_get(self):
            bundle = server.bundle
            if self.path == "/health":
                if bundle is None:
                    self._send(503, {"status": "loading", "model_version": None})
                else:
                    self._send(
                        200,
                        {
                            "status": "ok",
                            "model_version": bundle.metadata.get("model_version"),
                        },
                    )
            elif self.path == "/model/info":
                if bundle is None:
                    self._send(503, {"error": "model not loaded"})
                else:
                    self._send(200, bundle.metadata)
            else:
                self._send(404, {"error": f"no such endpoint: {self.path}"})

        def _route_post(self):
            bundle = server.bundle
            if self.path not in ("/classify", "/classify/batch"):
                self._send(404, {"error": f"no such endpoint: {self.path}"})
                return
            if bundle is None:
                self._send(503, {"error": "model not loaded"})
                return
            try:
                payload = self._read_json()
            except (ValueError, json.JSONDecodeError) as exc:
                self._send(400, {"error": f"malformed request: {exc}"})
                return

            if self.path == "/classify":
                url = payload.get("url") if isinstance(payload, dict) else None
                if not isinstance(url, str) or not url:
                    self._send(400, {"error": "body must be {\"url\": \"...\"}"})
                    return
                try:
                    self._send(200, classify_url(url, bundle).to_dict())
                except DegenerateInputError as exc:
                    self._send(400, {"error": str(exc)})
                return

            urls = payload.get("urls") if isinstance(payload, dict) else None
            if not isinstance(urls, list) or not all(isinstance(u, str) for u in urls):
                self._send(400, {"error": "body must be {\"urls\": [\"...\"]}"})
                return
            if len(urls) > MAX_BATCH:
                self._send(413, {"error": f"batch limited to {MAX_BATCH} URLs"})
                return
            out = []
            for u in urls:
                try:
                    out.append(classify_url(u, bundle).to_dict())
                except DegenerateInputError as exc:
                    out.append({"url": u, "error": str(exc)})
            self._send(200, out)

    return Handler


def serve_http(
    bundle: ModelBundle | None,
    bind_address: str = "127.0.0.1:8080",
    worker_count: int = 8,
) -> PredictionServer:
    """Start a prediction server on host:port and return the running handle."""
    host, _, port_s = bind_address.rpartition(":")
    server = PredictionServer(
        bundle, host=host or "127.0.0.1", port=int(port_s), worker_count=worker_count
    )
    return server.start()
