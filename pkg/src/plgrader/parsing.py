"""Completion parsing: reasoning/answer block extraction, tool calls,
and the three XML-format scores.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

SOFT_SCORE = 0.5
STRICT_SCORE = 0.5
TAG_SCORE = 0.125
PENALTY_PER_CHAR = 0.001

TAGS = ("<reasoning>", "</reasoning>", "<answer>", "</answer>")

_REASONING_RE = re.compile(r"<reasoning>(.*?)</reasoning>", re.DOTALL)
_ANSWER_RE = re.compile(r"<answer>(.*?)</answer>", re.DOTALL)
_SOFT_RE = re.compile(r"<reasoning>.*?</reasoning>.*?<answer>.*?</answer>", re.DOTALL)
_STRICT_RE = re.compile(
    r"^<reasoning>\n(.*?)\n</reasoning>\n<answer>\n(.*?)\n</answer>\s*$", re.DOTALL
)
_TOOL_CALL_RE = re.compile(r"<tool_call>", re.DOTALL)


@dataclass
class ToolCall:
    name: str
    code: str


@dataclass
class Completion:
    raw: str
    reasoning: str | None = None
    answer: str | None = None
    tool_calls: list[ToolCall] = field(default_factory=list)
    trailing_after_answer: str = ""
    malformed_tool_calls: int = 0


def extract_blocks(raw: str) -> Completion:
    """Parse a raw completion. Reasoning comes from the first
    <reasoning> pair, the answer from the LAST <answer> pair (agentic
    transcripts revise answers in place). Never fails.
    """
    reasoning_m = _REASONING_RE.search(raw)
    answers = _ANSWER_RE.findall(raw)
    trailing = ""
    end = raw.rfind("</answer>")
    if end >= 0:
        trailing = raw[end + len("</answer>"):]
    tool_calls, malformed = parse_tool_calls(raw, with_count=True)
    return Completion(
        raw=raw,
        reasoning=reasoning_m.group(1).strip() if reasoning_m else None,
        answer=answers[-1].strip() if answers else None,
        tool_calls=tool_calls,
        trailing_after_answer=trailing,
        malformed_tool_calls=malformed,
    )


def format_scores(raw: str) -> tuple[float, float, float]:
    """(soft, strict, xml_count) format rewards for a completion."""
    soft = SOFT_SCORE if _SOFT_RE.search(raw) else 0.0
    strict = STRICT_SCORE if _STRICT_RE.match(raw) else 0.0
    xml = _xml_count(raw)
    return soft, strict, xml


def _xml_count(raw: str) -> float:
    # a tag is correctly placed iff it appears exactly once and the
    # once-occurring tags read in canonical order
    counts = {tag: raw.count(tag) for tag in TAGS}
    positions = [raw.find(tag) for tag in TAGS]
    score = 0.0
    last_pos = -1
    for tag, pos in zip(TAGS, positions):
        if counts[tag] != 1:
            continue
        if pos > last_pos:
            score += TAG_SCORE
            last_pos = pos
    end = raw.rfind("</answer>")
    if end >= 0:
        score -= PENALTY_PER_CHAR * len(raw[end + len("</answer>"):])
    return max(0.0, score)


def parse_tool_calls(raw: str, with_count: bool = False):
    """Extract well-formed <tool_call>{...} blocks; malformed payloads
    are skipped and counted.
    """
    calls: list[ToolCall] = []
    malformed = 0
    decoder = json.JSONDecoder()
    for m in _TOOL_CALL_RE.finditer(raw):
        rest = raw[m.end():].lstrip()
        try:
            payload, _ = decoder.raw_decode(rest)
        except ValueError:
            malformed += 1
            continue
        if not isinstance(payload, dict):
            malformed += 1
            continue
        name = payload.get("name")
        args = payload.get("arguments")
        if isinstance(args, list):  # tolerate the declaration-style shape
            args = args[0] if args and isinstance(args[0], dict) else None
        code = args.get("code") if isinstance(args, dict) else None
        if not isinstance(name, str) or not name or not isinstance(code, str):
            malformed += 1
            continue
        calls.append(ToolCall(name=name, code=code))
    if with_count:
        return calls, malformed
    return calls
