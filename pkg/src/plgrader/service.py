"""Line-delimited JSON reward service: one request object per line in,
one response object per line out, over stdio or a TCP socket. Lets an
external trainer consume suite scores without linking this library.
"""

from __future__ import annotations

import json
import socketserver
import sys

from .rewards import GoldAnswer, RewardEngine
from .sandbox import PrologProgram

REQUEST_FIELDS = ("completion", "reference_answer", "gold", "suite", "progress_t")


class _ServiceRecord:
    """Minimal record shim: exactly what RewardEngine.suite_score needs."""

    def __init__(self, reference: str, gold: str):
        self.reference_program = PrologProgram(reference) if reference else None
        self.gold_value = GoldAnswer.from_raw(gold)


class RewardService:
    def __init__(self, engine: RewardEngine | None = None):
        self.engine = engine or RewardEngine()

    def handle_request(self, line: str) -> str:
        try:
            response = self._score(line)
        except Exception as exc:  # the server must survive any input
            response = {"ok": False, "total": 0.0, "components": {}, "error": str(exc)}
        return json.dumps(response, sort_keys=True)

    def _score(self, line: str) -> dict:
        try:
            req = json.loads(line)
        except json.JSONDecodeError as exc:
            return self._error(f"invalid JSON: {exc.msg}")
        if not isinstance(req, dict):
            return self._error("request must be a JSON object")
        missing = [k for k in ("completion", "gold", "suite") if k not in req]
        if missing:
            return self._error(f"missing field(s): {', '.join(missing)}")
        suite = req["suite"]
        if suite not in (1, 2, 3):
            return self._error(f"suite must be 1, 2, or 3 (got {suite!r})")
        t = req.get("progress_t", 1.0)
        if not isinstance(t, (int, float)) or not 0.0 <= float(t) <= 1.0:
            return self._error(f"progress_t must be in [0,1] (got {t!r})")
        record = _ServiceRecord(req.get("reference_answer", ""), str(req["gold"]))
        breakdown = self.engine.suite_score(str(req["completion"]), record, suite, float(t))
        return {
            "ok": True,
            "total": breakdown.total,
            "components": breakdown.components,
        }

    @staticmethod
    def _error(message: str) -> dict:
        return {"ok": False, "total": 0.0, "components": {}, "error": message}

    def serve_stdio(self, stdin=None, stdout=None):
        stdin = stdin or sys.stdin
        stdout = stdout or sys.stdout
        for line in stdin:
            if not line.strip():
                continue
            stdout.write(self.handle_request(line) + "\n")
            stdout.flush()

    def serve_tcp(self, host: str = "127.0.0.1", port: int = 0):
        """Blocking TCP server; returns only on shutdown. The bound
        address is available via the returned server's server_address
        when started through make_tcp_server()."""
        server = self.make_tcp_server(host, port)
        with server:
            server.serve_forever()

    def make_tcp_server(self, host: str = "127.0.0.1", port: int = 0):
        service = self

        class Handler(socketserver.StreamRequestHandler):
            def handle(self):
                for raw in self.rfile:
                    line = raw.decode("utf-8")
                    if not line.strip():
                        continue
                    out = service.handle_request(line) + "\n"
                    self.wfile.write(out.encode("utf-8"))
                    self.wfile.flush()

        class Server(socketserver.ThreadingTCPServer):
            allow_reuse_address = True
            daemon_threads = True

        return Server((host, port), Handler)
