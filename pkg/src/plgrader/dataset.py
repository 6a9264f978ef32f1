"""Dataset loading, validation, and cleaning for GSM8K-style records
paired with reference Prolog programs.

Each record's reference program is executed in the sandbox and its
result compared with the gold answer; mismatches are classified as
gold errors (bad official answer) or reference errors (broken program),
and `clean_dataset` rewrites the gold tails of the former.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .rewards import GoldAnswer, numbers_match
from .sandbox import PrologProgram, PrologSandbox

DEFAULT_FIELDS = {
    "id": "id",
    "question": "question",
    "prolog": "prolog",
    "answer": "answer",
    "split": "split",
}

_GOLD_TAIL_RE = re.compile(r"####\s*[^\n#]+?\s*$")


@dataclass
class DatasetRecord:
    id: str
    question: str
    reference_program: PrologProgram
    gold_raw: str
    gold_value: int | float | None
    split: str = "train"

    @classmethod
    def from_fields(cls, id, question, prolog, answer, split="train"):
        gold = GoldAnswer.from_raw(answer)
        return cls(
            id=id,
            question=question,
            reference_program=PrologProgram(prolog),
            gold_raw=answer,
            gold_value=gold.value,
            split=split,
        )


@dataclass
class ValidationReport:
    id: str
    status: str  # consistent | gold_error | reference_error
    computed: int | float | None
    gold: int | float | None


@dataclass
class LoadResult:
    records: list[DatasetRecord]
    errors: list[str] = field(default_factory=list)  # per-line problems, non-fatal


def load_records(path, field_map: dict | None = None) -> LoadResult:
    """Line-delimited JSON, one record per line. Bad lines are skipped
    and reported; an unreadable file is fatal."""
    fields = dict(DEFAULT_FIELDS)
    if field_map:
        fields.update(field_map)
    text = Path(path).read_text("utf-8")
    records: list[DatasetRecord] = []
    errors: list[str] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            errors.append(f"line {lineno}: invalid JSON ({exc.msg})")
            continue
        missing = [
            k for k in ("question", "prolog", "answer") if fields[k] not in obj
        ]
        if missing:
            errors.append(f"line {lineno}: missing field(s) {', '.join(missing)}")
            continue
        records.append(DatasetRecord.from_fields(
            id=str(obj.get(fields["id"], len(records) + 1)),
            question=obj[fields["question"]],
            prolog=obj[fields["prolog"]],
            answer=obj[fields["answer"]],
            split=obj.get(fields["split"], "train"),
        ))
    return LoadResult(records=records, errors=errors)


def validate_record(record: DatasetRecord, sandbox: PrologSandbox | None = None) -> ValidationReport:
    sandbox = sandbox or PrologSandbox()
    outcome = sandbox.execute(record.reference_program)
    if outcome.status != "numeric":
        return ValidationReport(record.id, "reference_error", None, record.gold_value)
    if record.gold_value is not None and numbers_match(outcome.value, record.gold_value):
        return ValidationReport(record.id, "consistent", outcome.value, record.gold_value)
    return ValidationReport(record.id, "gold_error", outcome.value, record.gold_value)


def _format_number(value) -> str:
    if isinstance(value, float) and value.is_integer():
        return str(int(value))  # official style writes integers bare
    return str(value)


def rewrite_gold(gold_raw: str, computed) -> str:
    """Replace (or append) the '#### N' tail, preserving the prose."""
    tail = f"#### {_format_number(computed)}"
    if _GOLD_TAIL_RE.search(gold_raw.rstrip()):
        return _GOLD_TAIL_RE.sub(tail, gold_raw.rstrip())
    return tail


@dataclass
class CleanSummary:
    total: int
    consistent: int
    gold_errors: int
    reference_errors: int
    skipped_lines: int


def clean_dataset(
    in_path,
    out_path,
    sandbox: PrologSandbox | None = None,
    field_map: dict | None = None,
) -> CleanSummary:
    """Validate every record and write the cleaned set: gold errors get
    their '#### N' tail rewritten to the computed value, reference
    errors pass through unchanged (flagged for manual repair)."""
    sandbox = sandbox or PrologSandbox()
    loaded = load_records(in_path, field_map=field_map)
    fields = dict(DEFAULT_FIELDS)
    if field_map:
        fields.update(field_map)
    consistent = gold_errors = reference_errors = 0
    with open(out_path, "w", encoding="utf-8") as out:
        for record in loaded.records:
            report = validate_record(record, sandbox)
            answer = record.gold_raw
            if report.status == "consistent":
                consistent += 1
            elif report.status == "gold_error":
                gold_errors += 1
                answer = rewrite_gold(record.gold_raw, report.computed)
            else:
                reference_errors += 1
            out.write(json.dumps({
                fields["id"]: record.id,
                fields["question"]: record.question,
                fields["prolog"]: record.reference_program.source,
                fields["answer"]: answer,
                fields["split"]: record.split,
            }) + "\n")
    return CleanSummary(
        total=len(loaded.records),
        consistent=consistent,
        gold_errors=gold_errors,
        reference_errors=reference_errors,
        skipped_lines=len(loaded.errors),
    )
