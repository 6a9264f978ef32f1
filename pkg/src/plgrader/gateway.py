"""Chat-completion backends: an HTTP client for OpenAI-compatible
endpoints and a deterministic scripted mock for offline tests, plus the
token estimator that gates context compression.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field

DEFAULT_TEMPERATURE = 0.2
DEFAULT_MAX_NEW_TOKENS = 1024
DEFAULT_BUDGET_TOKENS = 1890
MAX_RETRIES = 3

ENV_BASE_URL = "PLGRADER_API_BASE"
ENV_API_KEY = "PLGRADER_API_KEY"
ENV_MODEL = "PLGRADER_MODEL"


class GatewayError(Exception):
    pass


class TransportError(GatewayError):
    """Retryable transport failure; carries how many attempts were made."""

    def __init__(self, message: str, attempts: int):
        super().__init__(message)
        self.attempts = attempts


class ScriptExhaustedError(GatewayError):
    """The scripted mock ran out of responses — a test bug, not a protocol event."""


@dataclass
class ChatMessage:
    role: str  # system | user | assistant | tool
    content: str

    def __post_init__(self):
        if self.role not in ("system", "user", "assistant", "tool"):
            raise ValueError(f"bad role {self.role!r}")
        if not self.content and self.role != "assistant":
            raise ValueError(f"{self.role} message may not be empty")


@dataclass
class DecodingParams:
    temperature: float = DEFAULT_TEMPERATURE
    max_new_tokens: int = DEFAULT_MAX_NEW_TOKENS


def count_tokens(transcript: list[ChatMessage]) -> int:
    """Cheap estimator: ceil(total content chars / 4). Only gates
    compression, where a few percent of error is tolerable; swap in an
    exact tokenizer via the protocols' token_counter hook if needed.
    """
    chars = sum(len(m.content) for m in transcript)
    return math.ceil(chars / 4)


class HttpGateway:
    """OpenAI-compatible chat-completions client. Endpoint, key, and
    model come from arguments or the PLGRADER_API_* environment."""

    def __init__(
        self,
        base_url: str | None = None,
        api_key: str | None = None,
        model: str | None = None,
        timeout: float = 120.0,
        max_retries: int = MAX_RETRIES,
        backoff: float = 1.0,
        session=None,
    ):
        import requests

        self.base_url = (base_url or os.environ.get(ENV_BASE_URL, "")).rstrip("/")
        if not self.base_url:
            raise GatewayError(f"no API base URL (set {ENV_BASE_URL})")
        self.api_key = api_key or os.environ.get(ENV_API_KEY, "")
        self.model = model or os.environ.get(ENV_MODEL, "")
        if not self.model:
            raise GatewayError(f"no model name (set {ENV_MODEL})")
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff = backoff
        self._session = session or requests.Session()

    def complete(self, transcript: list[ChatMessage], params: DecodingParams) -> ChatMessage:
        import requests

        _check_transcript(transcript)
        body = {
            "model": self.model,
            "messages": [{"role": m.role, "content": m.content} for m in transcript],
            "temperature": params.temperature,
            "max_tokens": params.max_new_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        url = f"{self.base_url}/chat/completions"
        last_err = None
        for attempt in range(1 + self.max_retries):
            if attempt and self.backoff > 0:
                time.sleep(min(self.backoff * 2 ** (attempt - 1), 8 * self.backoff))
            try:
                resp = self._session.post(url, json=body, headers=headers, timeout=self.timeout)
                resp.raise_for_status()
                payload = resp.json()
                content = payload["choices"][0]["message"]["content"] or ""
                return ChatMessage("assistant", content)
            except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
                last_err = exc
        raise TransportError(f"chat completion failed: {last_err}", attempts=1 + self.max_retries)


@dataclass
class ScriptedStep:
    response: str
    match: str | None = None  # substring required in the last user/tool message


class ScriptedGateway:
    """Deterministic mock: replays responses in order. A step with a
    match predicate only fires when the last user/tool message contains
    the substring; a mismatch is a hard error (the script is wrong).
    """

    def __init__(self, steps: list[ScriptedStep | str]):
        self._steps = [
            s if isinstance(s, ScriptedStep) else ScriptedStep(response=s) for s in steps
        ]
        self._cursor = 0
        self.requests: list[dict] = []  # (transcript copy, params) per call

    def complete(self, transcript: list[ChatMessage], params: DecodingParams) -> ChatMessage:
        _check_transcript(transcript)
        self.requests.append({
            "messages": [(m.role, m.content) for m in transcript],
            "temperature": params.temperature,
            "max_new_tokens": params.max_new_tokens,
        })
        if self._cursor >= len(self._steps):
            raise ScriptExhaustedError(
                f"scripted gateway exhausted after {self._cursor} responses"
            )
        step = self._steps[self._cursor]
        if step.match is not None:
            last = next(
                (m for m in reversed(transcript) if m.role in ("user", "tool")), None
            )
            if last is None or step.match not in last.content:
                raise ScriptExhaustedError(
                    f"scripted step {self._cursor} expected {step.match!r} "
                    f"in the last user/tool message"
                )
        self._cursor += 1
        return ChatMessage("assistant", step.response)

    @property
    def exhausted(self) -> bool:
        return self._cursor >= len(self._steps)


def _check_transcript(transcript: list[ChatMessage]) -> None:
    if not transcript:
        raise GatewayError("empty transcript")
    if transcript[0].role != "system":
        raise GatewayError("transcript must start with a system message")
