"""Reward assembly: correctness scoring, the three grading suites, and
the sigmoid curriculum over component weights.

Suite 1 sums correctness, syntax, and the three format scores (max
4.5). Suite 2 adds the semantic reward (max 6.5). Suite 3 normalizes
five channels to [0,1], mixes them with curriculum weights, and scales
into [0,2].
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field

from . import analyzer, parsing, semantics
from .parsing import Completion, extract_blocks
from .sandbox import ExecutionOutcome, PrologProgram, PrologSandbox

CURRICULUM_K = 12.0
CURRICULUM_TAU = 0.5
EARLY_WEIGHTS = {
    "semantic": 0.35,
    "xml_format": 0.25,
    "syntax": 0.10,
    "correctness": 0.15,
    "structure": 0.15,
}
LATE_WEIGHTS = {
    "semantic": 0.10,
    "xml_format": 0.10,
    "syntax": 0.10,
    "correctness": 0.45,
    "structure": 0.25,
}
# native maxima used to normalize suite-3 channels into [0,1]
COMPONENT_MAXIMA = {
    "correctness": 2.0,
    "syntax": 1.0,
    "xml_format": 1.5,  # soft + strict + xml_count
    "semantic": 2.0,
    "structure": 2.0,
}
FLOAT_REL_TOL = 1e-6

_GOLD_TAIL_RE = re.compile(r"####\s*([^\n#]+?)\s*$")
_NUM_RE = re.compile(r"^[+-]?(\d+(\.\d+)?([eE][+-]?\d+)?|\.\d+)$")


@dataclass
class GoldAnswer:
    value: int | float | None
    raw: str

    @classmethod
    def from_raw(cls, raw: str) -> "GoldAnswer":
        """GSM8K-styled '#### N' tails or bare numbers."""
        m = _GOLD_TAIL_RE.search(raw.strip())
        text = m.group(1) if m else raw.strip()
        text = text.replace(",", "")
        value = None
        if _NUM_RE.match(text):
            f = float(text)
            value = int(f) if f.is_integer() and "." not in text and "e" not in text.lower() else f
        return cls(value=value, raw=raw)


@dataclass
class CurriculumSchedule:
    early: dict[str, float] = field(default_factory=lambda: dict(EARLY_WEIGHTS))
    late: dict[str, float] = field(default_factory=lambda: dict(LATE_WEIGHTS))
    k: float = CURRICULUM_K
    tau: float = CURRICULUM_TAU

    def __post_init__(self):
        if set(self.early) != set(self.late):
            raise ValueError("early/late weight maps must share keys")
        for name, wm in (("early", self.early), ("late", self.late)):
            if abs(sum(wm.values()) - 1.0) > 1e-9:
                raise ValueError(f"{name} weights must sum to 1.0")

    def sigma(self, t: float) -> float:
        return 1.0 / (1.0 + math.exp(-self.k * (t - self.tau)))


@dataclass
class RewardBreakdown:
    suite: int
    components: dict[str, float]
    normalized: dict[str, float]
    weights: dict[str, float]
    total: float
    progress_t: float


def numbers_match(a, b) -> bool:
    """Integer-exact, float within relative tolerance 1e-6."""
    if a is None or b is None:
        return False
    if isinstance(a, int) and isinstance(b, int):
        return a == b
    return math.isclose(float(a), float(b), rel_tol=FLOAT_REL_TOL, abs_tol=0.0) or (
        float(a) == float(b)
    )


def correctness_reward(outcome: ExecutionOutcome, gold: GoldAnswer) -> float:
    if outcome.status == "numeric":
        return 2.0 if numbers_match(outcome.value, gold.value) else 1.0
    if outcome.status in ("non_numeric", "unbound_or_failed", "timeout"):
        return 0.5  # an executable attempt
    return 0.0  # syntax_error / empty


def curriculum_weights(schedule: CurriculumSchedule, t: float) -> dict[str, float]:
    if not 0.0 <= t <= 1.0:
        warnings.warn(f"progress t={t} outside [0,1]; clamping", stacklevel=2)
        t = min(max(t, 0.0), 1.0)
    s = schedule.sigma(t)
    w = {k: schedule.early[k] + (schedule.late[k] - schedule.early[k]) * s
         for k in schedule.early}
    total = sum(w.values())
    return {k: v / total for k, v in w.items()}


def suite3_total(components: dict[str, float], weights: dict[str, float]) -> float:
    """Pure suite-3 aggregate: normalize by native maxima, clip to
    [0,1], weight, scale into [0,2]."""
    total = 0.0
    for name, weight in weights.items():
        raw = components.get(name, 0.0)
        norm = min(max(raw / COMPONENT_MAXIMA[name], 0.0), 1.0)
        total += weight * norm
    return min(max(2.0 * total, 0.0), 2.0)


class RewardEngine:
    """Grades one completion against one dataset record.

    The record only needs a ``reference_program`` (PrologProgram) and a
    ``gold_value``; the full dataset loader provides both.
    """

    def __init__(
        self,
        sandbox: PrologSandbox | None = None,
        schedule: CurriculumSchedule | None = None,
        embedder=None,
    ):
        self.sandbox = sandbox or PrologSandbox()
        self.schedule = schedule or CurriculumSchedule()
        self.embedder = embedder

    def suite_score(
        self,
        completion: Completion | str,
        record,
        suite: int,
        t: float = 1.0,
    ) -> RewardBreakdown:
        if suite not in (1, 2, 3):
            raise ValueError(f"unknown suite {suite!r}")
        if isinstance(completion, str):
            completion = extract_blocks(completion)

        answer = completion.answer or ""
        program = PrologProgram(answer)
        if answer.strip():
            outcome = self.sandbox.execute(program)
        else:
            outcome = ExecutionOutcome("empty", None, "", "", False, 0.0)

        gold = getattr(record, "gold_value", None)
        gold = gold if isinstance(gold, GoldAnswer) else GoldAnswer(gold, str(gold))
        soft, strict, xml = parsing.format_scores(completion.raw)
        components: dict[str, float] = {
            "correctness": correctness_reward(outcome, gold),
            "syntax": analyzer.syntax_reward(answer),
            "soft_format": soft,
            "strict_format": strict,
            "xml_count": xml,
        }

        reference = getattr(record, "reference_program", None)
        ref_source = reference.source if reference is not None else None
        if suite >= 2:
            sem = semantics.semantic_score(answer, ref_source, embedder=self.embedder)
            components["semantic"] = sem.reward

        if suite == 1:
            total = sum(components.values())
            return RewardBreakdown(1, components, {}, {}, total, t)
        if suite == 2:
            total = sum(components.values())
            return RewardBreakdown(2, components, {}, {}, total, t)

        struct = analyzer.structure_reward(analyzer.analyze(program))
        components["structure"] = struct.s_final
        channels = {
            "correctness": components["correctness"],
            "syntax": components["syntax"],
            "xml_format": soft + strict + xml,
            "semantic": components["semantic"],
            "structure": components["structure"],
        }
        weights = curriculum_weights(self.schedule, t)
        normalized = {
            name: min(max(raw / COMPONENT_MAXIMA[name], 0.0), 1.0)
            for name, raw in channels.items()
        }
        total = suite3_total(channels, weights)
        components["xml_format"] = channels["xml_format"]
        return RewardBreakdown(3, components, normalized, weights, total, t)
