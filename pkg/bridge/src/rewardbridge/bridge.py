from __future__ import annotations

import json
import shlex
import socket
import subprocess
from dataclasses import dataclass

DEFAULT_SPAWN_COMMAND = "plgrader serve --stdio"


class BridgeError(Exception):
    pass


@dataclass
class BridgeConfig:
    mode: str = "spawn-stdio"  # spawn-stdio | connect-tcp
    endpoint: str = DEFAULT_SPAWN_COMMAND  # command line, or host:port
    suite: int = 3
    timeout: float = 60.0

    def __post_init__(self):
        if self.mode not in ("spawn-stdio", "connect-tcp"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.suite not in (1, 2, 3):
            raise ValueError(f"suite must be 1, 2, or 3 (got {self.suite!r})")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


@dataclass
class BridgeResponse:
    ok: bool
    total: float
    components: dict
    error: str | None
    raw: str  # untouched response line from the service


class _StdioTransport:
    def __init__(self, command: str):
        self.command = command
        try:
            self.proc = subprocess.Popen(
                shlex.split(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise ConnectionError(f"cannot spawn reward service: {exc}") from exc

    def request(self, line: str) -> str:
        try:
            self.proc.stdin.write(line + "\n")
            self.proc.stdin.flush()
            response = self.proc.stdout.readline()
        except (OSError, ValueError) as exc:
            raise BridgeError(f"service pipe broken: {exc}") from exc
        if not response:
            raise BridgeError("service closed the pipe")
        return response.rstrip("\n")

    def close(self):
        if self.proc.poll() is None:
            self.proc.stdin.close()
            try:
                self.proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self.proc.kill()


class _TcpTransport:
    def __init__(self, endpoint: str, timeout: float):
        host, _, port = endpoint.rpartition(":")
        try:
            self.sock = socket.create_connection((host or "127.0.0.1", int(port)), timeout=timeout)
        except OSError as exc:
            raise ConnectionError(f"cannot reach reward service at {endpoint}: {exc}") from exc
        self.reader = self.sock.makefile("r", encoding="utf-8")
        self.writer = self.sock.makefile("w", encoding="utf-8")

    def request(self, line: str) -> str:
        try:
            self.writer.write(line + "\n")
            self.writer.flush()
            response = self.reader.readline()
        except OSError as exc:
            raise BridgeError(f"service connection broken: {exc}") from exc
        if not response:
            raise BridgeError("service closed the connection")
        return response.rstrip("\n")

    def close(self):
        self.sock.close()


class RewardBridge:
    """One service connection; callers needing parallelism create more
    instances. The bridge does no score arithmetic of its own."""

    def __init__(self, config: BridgeConfig | None = None):
        self.config = config or BridgeConfig()
        self._transport = self._connect()

    def _connect(self):
        if self.config.mode == "spawn-stdio":
            return _StdioTransport(self.config.endpoint)
        return _TcpTransport(self.config.endpoint, self.config.timeout)

    def close(self):
        self._transport.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def score_batch(
        self,
        completions: list[str],
        references: list[str],
        golds: list[str],
        progress_t: float = 1.0,
    ) -> list[BridgeResponse]:
        if not (len(completions) == len(references) == len(golds)):
            raise ValueError("completions, references, and golds must align")
        responses = []
        for completion, reference, gold in zip(completions, references, golds):
            line = json.dumps({
                "completion": completion,
                "reference_answer": reference,
                "gold": gold,
                "suite": self.config.suite,
                "progress_t": progress_t,
            })
            responses.append(self._score_one(line))
        return responses

    def _score_one(self, line: str) -> BridgeResponse:
        try:
            raw = self._transport.request(line)
        except BridgeError:
            # one reconnect-and-retry, then surface the failure per-item
            try:
                self._transport.close()
                self._transport = self._connect()
                raw = self._transport.request(line)
            except (BridgeError, ConnectionError) as exc:
                return BridgeResponse(False, 0.0, {}, str(exc), "")
        payload = json.loads(raw)
        return BridgeResponse(
            ok=payload.get("ok", False),
            total=payload.get("total", 0.0),
            components=payload.get("components", {}),
            error=payload.get("error"),
            raw=raw,
        )
