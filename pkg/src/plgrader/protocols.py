"""The four inference protocols as explicit state machines over a chat
gateway and the Prolog sandbox: single-try, multiple-try (best-of-N),
agentic with internal feedback, and agentic with independent retries.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .gateway import ChatMessage, DecodingParams, count_tokens
from .parsing import extract_blocks
from .prompts import render_feedback
from .sandbox import ExecutionOutcome, PrologProgram, PrologSandbox

TOOL_NAME = "run_prolog"
SUMMARY_PREFIX = "[compressed context]"


@dataclass
class Problem:
    question: str
    system_prompt: str


@dataclass
class ProtocolConfig:
    protocol: str = "single"  # single | multiple | agentic_internal | agentic_independent
    n_max: int = 20
    turn_cap: int = 20
    base_temperature: float = 0.2
    shake_factor: float = 1.15
    temperature_cap: float = 0.3
    budget_tokens: int = 1890
    compress_threshold: float = 0.95
    empty_repeat_limit: int = 2
    duplicate_limit: int = 2
    max_new_tokens: int = 1024


@dataclass
class TurnRecord:
    index: int
    events: list[dict] = field(default_factory=list)
    outcome: ExecutionOutcome | None = None

    def to_json(self) -> str:
        payload = {"turn": self.index, "events": self.events}
        if self.outcome is not None:
            payload["outcome"] = {
                "status": self.outcome.status,
                "value": self.outcome.value,
                "stdout": self.outcome.raw_stdout,
            }
        return json.dumps(payload, sort_keys=True)


@dataclass
class ProtocolResult:
    answer: int | float | None
    turns_used: int
    tries_used: int
    first_success_index: int | None
    transcript_log: list[TurnRecord]
    terminal: str  # answered | budget_exhausted


def _select_code(completion):
    """Per-turn execution source: a run_prolog tool call wins over the
    answer block."""
    for tc in completion.tool_calls:
        if tc.name == TOOL_NAME:
            return tc.code, "tool_call"
    if completion.answer is not None:
        return completion.answer, "answer"
    return None, None


def _base_transcript(problem: Problem) -> list[ChatMessage]:
    return [
        ChatMessage("system", problem.system_prompt),
        ChatMessage("user", problem.question),
    ]


def run_single_try(problem: Problem, cfg: ProtocolConfig, gateway, sandbox: PrologSandbox) -> ProtocolResult:
    transcript = _base_transcript(problem)
    params = DecodingParams(temperature=cfg.base_temperature, max_new_tokens=cfg.max_new_tokens)
    reply = gateway.complete(transcript, params)
    record = TurnRecord(1)
    record.events.append(
        {"event": "generation", "content": reply.content, "temperature": params.temperature}
    )
    code, source = _select_code(extract_blocks(reply.content))
    outcome = None
    if code is not None:
        outcome = sandbox.execute(PrologProgram(code))
        record.outcome = outcome
        record.events.append(
            {"event": "execution", "source": source, "code": code, "status": outcome.status}
        )
    answered = outcome is not None and outcome.status == "numeric"
    return ProtocolResult(
        answer=outcome.value if answered else None,
        turns_used=1,
        tries_used=1,
        first_success_index=1 if answered else None,
        transcript_log=[record],
        terminal="answered" if answered else "budget_exhausted",
    )


def run_multiple_try(problem: Problem, cfg: ProtocolConfig, gateway, sandbox: PrologSandbox) -> ProtocolResult:
    """Best-of-N: independent samples from the identical prompt, halting
    at the first numeric execution (correctness is not checked here)."""
    log: list[TurnRecord] = []
    params = DecodingParams(temperature=cfg.base_temperature, max_new_tokens=cfg.max_new_tokens)
    for i in range(1, cfg.n_max + 1):
        reply = gateway.complete(_base_transcript(problem), params)
        record = TurnRecord(i)
        record.events.append(
            {"event": "generation", "content": reply.content, "temperature": params.temperature}
        )
        log.append(record)
        code, source = _select_code(extract_blocks(reply.content))
        if code is None:
            continue
        outcome = sandbox.execute(PrologProgram(code))
        record.outcome = outcome
        record.events.append(
            {"event": "execution", "source": source, "code": code, "status": outcome.status}
        )
        if outcome.status == "numeric":
            return ProtocolResult(
                answer=outcome.value,
                turns_used=i,
                tries_used=i,
                first_success_index=i,
                transcript_log=log,
                terminal="answered",
            )
    return ProtocolResult(
        answer=None,
        turns_used=cfg.n_max,
        tries_used=cfg.n_max,
        first_success_index=None,
        transcript_log=log,
        terminal="budget_exhausted",
    )


class _AgenticSession:
    """Shared inner loop for the two agentic protocols."""

    def __init__(self, problem, cfg, gateway, sandbox, allow_reset):
        self.problem = problem
        self.cfg = cfg
        self.gateway = gateway
        self.sandbox = sandbox
        self.allow_reset = allow_reset
        self.log: list[TurnRecord] = []
        self.turn = 0
        self.tries = 1
        self._fresh_session()

    def _fresh_session(self):
        self.transcript = _base_transcript(self.problem)
        self.temperature = self.cfg.base_temperature
        self.assistant_history: list[str] = []
        self.answer_blocks: list[str] = []
        self.consecutive_empty = 0
        self.consecutive_nonnumeric_code: str | None = None
        self.consecutive_nonnumeric_count = 0

    def run(self) -> ProtocolResult:
        cfg = self.cfg
        while self.turn < cfg.turn_cap:
            self.turn += 1
            record = TurnRecord(self.turn)
            self.log.append(record)
            self._maybe_compress(record)
            reply = self.gateway.complete(
                self.transcript,
                DecodingParams(temperature=self.temperature, max_new_tokens=cfg.max_new_tokens),
            )
            self.transcript.append(reply)
            record.events.append(
                {"event": "generation", "content": reply.content, "temperature": self.temperature}
            )
            self._maybe_shake(reply.content, record)

            completion = extract_blocks(reply.content)
            code, source = _select_code(completion)
            outcome = None
            if code is not None and code.strip():
                outcome = self.sandbox.execute(PrologProgram(code))
                record.outcome = outcome
                record.events.append(
                    {"event": "execution", "source": source, "code": code, "status": outcome.status}
                )
            if outcome is not None and outcome.status == "numeric":
                return ProtocolResult(
                    answer=outcome.value,
                    turns_used=self.turn,
                    tries_used=self.tries,
                    first_success_index=self.tries,
                    transcript_log=self.log,
                    terminal="answered",
                )

            self._track_failure(reply.content, completion, code, outcome)
            if self.allow_reset and self._should_reset() and self.turn < cfg.turn_cap:
                self.tries += 1
                self._fresh_session()
                record.events.append({"event": "reset", "try": self.tries})
                continue
            feedback = ChatMessage("user", render_feedback())
            self.transcript.append(feedback)
            record.events.append({"event": "feedback_injection", "content": feedback.content})
        return ProtocolResult(
            answer=None,
            turns_used=self.turn,
            tries_used=self.tries,
            first_success_index=None,
            transcript_log=self.log,
            terminal="budget_exhausted",
        )

    def _maybe_shake(self, content: str, record: TurnRecord):
        duplicate = content in self.assistant_history
        self.assistant_history.append(content)
        if not content.strip() or duplicate:
            new = min(self.temperature * self.cfg.shake_factor, self.cfg.temperature_cap)
            if new != self.temperature:
                record.events.append(
                    {"event": "temperature_change", "from": self.temperature, "to": new}
                )
            self.temperature = new

    def _maybe_compress(self, record: TurnRecord):
        cfg = self.cfg
        if count_tokens(self.transcript) >= cfg.compress_threshold * cfg.budget_tokens:
            before = len(self.transcript)
            self.transcript = compress_context(self.transcript, cfg, turns=self.log)
            if len(self.transcript) != before:
                record.events.append(
                    {"event": "compression", "messages": len(self.transcript)}
                )

    def _track_failure(self, content, completion, code, outcome):
        if not content.strip():
            self.consecutive_empty += 1
        else:
            self.consecutive_empty = 0
        if completion.answer is not None:
            self.answer_blocks.append(completion.answer)
        if outcome is not None and outcome.status == "non_numeric" and code is not None:
            if code == self.consecutive_nonnumeric_code:
                self.consecutive_nonnumeric_count += 1
            else:
                self.consecutive_nonnumeric_code = code
                self.consecutive_nonnumeric_count = 1
        else:
            self.consecutive_nonnumeric_code = None
            self.consecutive_nonnumeric_count = 0

    def _should_reset(self) -> bool:
        cfg = self.cfg
        if self.consecutive_empty >= cfg.empty_repeat_limit:
            return True
        if self.answer_blocks:
            last = self.answer_blocks[-1]
            if self.answer_blocks.count(last) >= cfg.duplicate_limit:
                return True
        return self.consecutive_nonnumeric_count >= cfg.duplicate_limit


def run_agentic_internal(problem: Problem, cfg: ProtocolConfig, gateway, sandbox: PrologSandbox) -> ProtocolResult:
    return _AgenticSession(problem, cfg, gateway, sandbox, allow_reset=False).run()


def run_agentic_independent(problem: Problem, cfg: ProtocolConfig, gateway, sandbox: PrologSandbox) -> ProtocolResult:
    return _AgenticSession(problem, cfg, gateway, sandbox, allow_reset=True).run()


PROTOCOLS = {
    "single": run_single_try,
    "multiple": run_multiple_try,
    "agentic_internal": run_agentic_internal,
    "agentic_independent": run_agentic_independent,
}


def run_protocol(problem: Problem, cfg: ProtocolConfig, gateway, sandbox: PrologSandbox) -> ProtocolResult:
    try:
        fn = PROTOCOLS[cfg.protocol]
    except KeyError:
        raise ValueError(f"unknown protocol {cfg.protocol!r}") from None
    return fn(problem, cfg, gateway, sandbox)


def _digest_line(turn: TurnRecord) -> str:
    if turn.outcome is None:
        return f"turn {turn.index}: no_execution, result=none"
    stdout = turn.outcome.raw_stdout.strip() or "none"
    return f"turn {turn.index}: {turn.outcome.status}, result={stdout}"


def compress_context(
    transcript: list[ChatMessage],
    cfg: ProtocolConfig | None = None,
    turns: list[TurnRecord] | None = None,
) -> list[ChatMessage]:
    """Keep the first system+user pair and the last two turns (four
    messages) verbatim; fold everything older into one-line digests
    inside a single summary message. Idempotent."""
    if len(transcript) < 4:
        return list(transcript)
    head, rest = transcript[:2], transcript[2:]
    existing: list[str] = []
    if rest and rest[0].role == "user" and rest[0].content.startswith(SUMMARY_PREFIX):
        existing = rest[0].content.splitlines()[1:]
        rest = rest[1:]
    tail = rest[-4:]
    middle = rest[:-4]
    if not middle:
        return list(transcript)
    n_digested = sum(1 for m in middle if m.role == "assistant")
    if turns is not None:
        pool = turns[len(existing):len(existing) + n_digested]
        new_lines = [_digest_line(t) for t in pool]
    else:
        new_lines = [
            f"turn {len(existing) + i + 1}: unknown, result=none" for i in range(n_digested)
        ]
    lines = existing + new_lines
    summary = ChatMessage("user", SUMMARY_PREFIX + "\n" + "\n".join(lines))
    return head + [summary] + tail
