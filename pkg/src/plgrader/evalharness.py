"""Runs a protocol over a dataset and computes accuracy, semantic
similarity, and structural-validity percentages, plus a multiple-choice
mode where the answer is a zero-based option index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import analyzer, prompts, semantics
from .parsing import extract_blocks
from .protocols import Problem, ProtocolConfig, run_protocol
from .rewards import RewardEngine, numbers_match
from .sandbox import PrologProgram, PrologSandbox


@dataclass
class MMLURecord:
    id: str
    question: str
    options: list[str]
    gold_index: int


@dataclass
class MetricsReport:
    n: int
    acc: float
    sem: float
    sem_alt: float
    struc: float
    per_example: list[dict] = field(default_factory=list)


def _mmlu_prompt(record: MMLURecord) -> str:
    lines = [record.question, ""]
    lines += [f"{i}. {text}" for i, text in enumerate(record.options)]
    return "\n".join(lines)


def _final_answer_block(result) -> str | None:
    """The program behind the protocol's final execution, if any."""
    for turn in reversed(result.transcript_log):
        for event in reversed(turn.events):
            if event.get("event") == "execution":
                return event.get("code")
    return None


def evaluate(
    records,
    protocol_cfg: ProtocolConfig,
    gateway,
    prompt_variant: str = "sp-struct",
    suite_for_reporting: int | None = None,
    mmlu: bool = False,
    sandbox: PrologSandbox | None = None,
    embedder=None,
    prompt_library: prompts.PromptLibrary | None = None,
) -> MetricsReport:
    sandbox = sandbox or PrologSandbox()
    library = prompt_library or prompts.PromptLibrary()
    agentic = protocol_cfg.protocol in ("agentic_internal", "agentic_independent")
    system = library.get_system_prompt(prompt_variant, agentic=agentic, mmlu=mmlu)
    engine = RewardEngine(sandbox=sandbox, embedder=embedder)

    per_example: list[dict] = []
    n_correct = n_struct = 0
    cos_values: list[float] = []
    sem_values: list[float] = []
    for record in records:
        question = _mmlu_prompt(record) if mmlu else record.question
        result = run_protocol(
            Problem(question=question, system_prompt=system),
            protocol_cfg, gateway, sandbox,
        )
        if mmlu:
            gold = record.gold_index
            correct = (
                result.answer is not None
                and float(result.answer).is_integer()
                and int(result.answer) == gold
            )
        else:
            gold = record.gold_value
            correct = numbers_match(result.answer, gold)
        n_correct += correct

        row = {
            "id": record.id,
            "answer": result.answer,
            "correct": correct,
            "turns_used": result.turns_used,
            "terminal": result.terminal,
        }
        if mmlu:
            row["cos"] = None
            row["struct_valid"] = None
        else:
            final = _final_answer_block(result) or ""
            sem = semantics.semantic_score(
                final, record.reference_program.source, embedder=embedder
            )
            struct = analyzer.structure_reward(analyzer.analyze(PrologProgram(final)))
            row["cos"] = sem.cosine
            row["struct_valid"] = struct.struct_valid
            cos_values.append(sem.cosine)
            sem_values.append(sem.s_sem)
            n_struct += struct.struct_valid
            if suite_for_reporting is not None:
                breakdown = engine.suite_score(final and f"<answer>{final}</answer>" or "",
                                               record, suite_for_reporting)
                row["reward_total"] = breakdown.total
        per_example.append(row)

    n = len(per_example)
    return MetricsReport(
        n=n,
        acc=100.0 * n_correct / n if n else 0.0,
        sem=100.0 * sum(cos_values) / len(cos_values) if cos_values else 0.0,
        sem_alt=100.0 * sum(sem_values) / len(sem_values) if sem_values else 0.0,
        struc=100.0 * n_struct / n if n else 0.0,
        per_example=per_example,
    )


def report(metrics: MetricsReport, format: str = "table") -> str:
    if format == "table":
        header = f"{'n':>6}  {'Acc':>7}  {'Sem':>7}  {'Struc':>7}"
        row = (
            f"{metrics.n:>6}  {metrics.acc:>7.2f}  "
            f"{metrics.sem:>7.2f}  {metrics.struc:>7.2f}"
        )
        return header + "\n" + row
    if format == "json-lines":
        lines = [json.dumps(row, sort_keys=True) for row in metrics.per_example]
        lines.append(json.dumps({
            "summary": True,
            "n": metrics.n,
            "acc": metrics.acc,
            "sem": metrics.sem,
            "sem_alt": metrics.sem_alt,
            "struc": metrics.struc,
        }, sort_keys=True))
        return "\n".join(lines)
    raise ValueError(f"unknown report format {format!r}")
