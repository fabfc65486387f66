"""Mock remote segmentation server for protocol tests and UI demos.

The default mode echoes the request's spectral prompt back as the score
map, which makes end-to-end transport checks bit-exact. The failure modes
exist so clients can prove they reject out-of-contract responses.

Run standalone:  python3 -m hsiseg.remote_mock --bind 127.0.0.1:9901 --mode echo
"""

from __future__ import annotations

import argparse
import base64
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

MODES = ("echo", "wrong_dims", "out_of_range", "server_error", "garbage")


def _handle(mode: str, payload: dict) -> tuple[int, bytes, str]:
    height = payload["height"]
    width = payload["width"]
    if mode == "server_error":
        return 500, json.dumps({"error": "synthetic backend failure"}).encode(), "application/json"
    if mode == "garbage":
        return 200, b"this is not json {", "text/plain"

    raw = base64.b64decode(payload["prompt_b64"])
    scores = np.frombuffer(raw, dtype="<f4").reshape(height, width)
    if mode == "out_of_range":
        scores = scores.copy()
        scores.flat[0] = 1.5
    if mode == "wrong_dims":
        height = height + 1
        scores = np.vstack([scores, scores[-1:]])
    doc = {
        "height": int(height),
        "width": int(width),
        "scores_b64": base64.b64encode(scores.astype("<f4").tobytes()).decode("ascii"),
    }
    return 200, json.dumps(doc).encode(), "application/json"


class _Handler(BaseHTTPRequestHandler):
    mode = "echo"

    def do_POST(self):
        if not self.path.endswith("/segment"):
            self._reply(404, json.dumps({"error": "not found"}).encode(), "application/json")
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            payload = json.loads(self.rfile.read(length))
            status, body, ctype = _handle(self.mode, payload)
        except Exception as exc:  # noqa: BLE001 - mock replies instead of dying
            status, body, ctype = 400, json.dumps({"error": str(exc)}).encode(), "application/json"
        self._reply(status, body, ctype)

    def _reply(self, status: int, body: bytes, ctype: str):
        self.send_response(status)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, fmt, *args):  # quiet by default
        pass


def make_server(mode: str = "echo", host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
    if mode not in MODES:
        raise ValueError(f"unknown mock mode {mode!r}; expected one of {MODES}")
    handler = type("Handler", (_Handler,), {"mode": mode})
    return ThreadingHTTPServer((host, port), handler)


class MockRemote:
    """Context manager running the mock on an ephemeral port in a thread."""

    def __init__(self, mode: str = "echo"):
        self.server = make_server(mode)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    @property
    def endpoint(self) -> str:
        host, port = self.server.server_address[:2]
        return f"http://{host}:{port}"

    def __enter__(self) -> "MockRemote":
        self.thread.start()
        return self

    def __exit__(self, *exc):
        self.server.shutdown()
        self.server.server_close()
        self.thread.join(timeout=5)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="mock remote segmentation backend")
    parser.add_argument("--bind", default="127.0.0.1:9901", help="host:port to listen on")
    parser.add_argument("--mode", default="echo", choices=MODES)
    args = parser.parse_args(argv)
    host, _, port = args.bind.rpartition(":")
    server = make_server(args.mode, host or "127.0.0.1", int(port))
    print(f"mock remote backend ({args.mode}) on http://{server.server_address[0]}:{server.server_address[1]}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
