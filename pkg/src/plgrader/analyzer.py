"""Surface analysis of candidate Prolog programs: predicate and
constraint counting, hard-coded-answer detection, predicate-name
extraction, and the structure/syntax rewards built on those counts.

The analysis is token-based (comments and quoted atoms are handled by
the tokenizer), so it needs no Prolog runtime. A compatibility mode can
shell out to the bundled ``prolog_helpers.pl`` under SWI-Prolog for
differential testing.
"""

from __future__ import annotations

import re
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .prolog.engine import tokenize
from .sandbox import PrologProgram

PREDICATE_STEP = 0.25
PREDICATE_CAP = 0.75
CONSTRAINT_STEP = 0.30
CONSTRAINT_CAP = 0.90
MAX_RAW = PREDICATE_CAP + CONSTRAINT_CAP  # 1.65
HARDCODE_FACTOR = 0.2
SYNTAX_STEP = 0.2

HELPERS_FILE = Path(__file__).parent / "assets" / "prolog_helpers.pl"


@dataclass
class AnalysisReport:
    predicate_count: int
    constraint_count: int
    hardcoded: bool
    predicate_names: set[str]


@dataclass
class StructureScore:
    s_p: float
    s_c: float
    s_raw: float
    s_final: float
    struct_valid: bool
    struct_pct: float


def _clauses_tokens(source: str):
    """Token runs, one per clause (split at end-of-clause '.')."""
    toks = tokenize(source, tolerant=True)
    clause = []
    for t in toks:
        if t.kind == "end":
            if clause:
                yield clause
            clause = []
        else:
            clause.append(t)
    if clause:
        yield clause


def _head_indicator(clause):
    """(name, arity) of a clause head, or None for directives and
    non-identifier heads."""
    if not clause:
        return None
    first = clause[0]
    if first.kind == "atom" and first.value in (":-", "?-"):
        return None  # directive
    if first.kind != "atom" or not re.match(r"^[a-z]\w*$", str(first.value)):
        return None
    if len(clause) == 1 or not (
        clause[1].kind == "punct" and clause[1].value == "(" and clause[1].glued
    ):
        return (first.value, 0)
    depth = 0
    commas = 0
    for t in clause[1:]:
        if t.kind == "punct" and t.value in "([{":
            depth += 1
        elif t.kind == "punct" and t.value in ")]}":
            depth -= 1
            if depth == 0:
                break
        elif t.kind == "punct" and t.value == "," and depth == 1:
            commas += 1
    return (first.value, commas + 1)


def _split_head_body(clause):
    for i, t in enumerate(clause):
        if t.kind == "atom" and t.value == ":-" and i > 0:
            return clause[:i], clause[i + 1:]
    return clause, []


def analyze(program: PrologProgram) -> AnalysisReport:
    predicates = set()
    hardcoded = False
    constraint_count = 0
    for clause in _clauses_tokens(program.source):
        head = _head_indicator(clause)
        if head is not None and head[0] != "solve":
            predicates.add(head)
        # constraint goals: top-level commas inside each { ... } region
        brace_depth = 0
        paren_depth = 0
        region_goals = 0
        for t in clause:
            if t.kind == "punct" and t.value == "{":
                brace_depth += 1
                if brace_depth == 1:
                    region_goals = 0
            elif t.kind == "punct" and t.value == "}":
                brace_depth -= 1
                if brace_depth == 0:
                    constraint_count += region_goals
            elif brace_depth > 0:
                if t.kind == "punct" and t.value in "([":
                    paren_depth += 1
                elif t.kind == "punct" and t.value in ")]":
                    paren_depth -= 1
                elif t.kind == "punct" and t.value == "," and paren_depth == 0 and brace_depth == 1:
                    region_goals += 1
                if region_goals == 0:
                    region_goals = 1
        if head is not None and head[0] == "solve":
            _, body = _split_head_body(clause)
            if _has_literal_assignment(body):
                hardcoded = True
    return AnalysisReport(
        predicate_count=len(predicates),
        constraint_count=constraint_count,
        hardcoded=hardcoded,
        predicate_names=extract_predicate_names(program),
    )


def _has_literal_assignment(body):
    """Matches '... = <number>' ending a goal, bare or inside braces."""
    for i, t in enumerate(body):
        if not (t.kind == "atom" and t.value == "="):
            continue
        j = i + 1
        if j < len(body) and body[j].kind == "atom" and body[j].value == "-":
            j += 1
        if j >= len(body) or body[j].kind not in ("int", "float"):
            continue
        k = j + 1
        if k >= len(body):
            return True
        nxt = body[k]
        if nxt.kind == "punct" and nxt.value in (",", "}"):
            return True
    return False


def extract_predicate_names(program: PrologProgram) -> set[str]:
    """Lowercase-initial identifiers applied at goal or head position
    (depth 0, outside curly-brace constraint regions); includes solve.
    """
    names: set[str] = set()
    for clause in _clauses_tokens(program.source):
        if clause and clause[0].kind == "atom" and clause[0].value in (":-", "?-"):
            continue
        depth = 0
        brace_depth = 0
        for i, t in enumerate(clause):
            if t.kind == "punct" and t.value == "{":
                brace_depth += 1
            elif t.kind == "punct" and t.value == "}":
                brace_depth -= 1
            elif t.kind == "punct" and t.value in "([":
                depth += 1
            elif t.kind == "punct" and t.value in ")]":
                depth -= 1
            elif (
                t.kind == "atom" and depth == 0 and brace_depth == 0
                and re.match(r"^[a-z]\w*$", str(t.value))
                and i + 1 < len(clause)
                and clause[i + 1].kind == "punct"
                and clause[i + 1].value == "("
                and clause[i + 1].glued
            ):
                names.add(t.value)
    return names


def structure_reward(report: AnalysisReport) -> StructureScore:
    s_p = min(PREDICATE_STEP * report.predicate_count, PREDICATE_CAP)
    s_c = min(CONSTRAINT_STEP * report.constraint_count, CONSTRAINT_CAP)
    s_raw = s_p + s_c
    s_final = HARDCODE_FACTOR * s_raw if report.hardcoded else s_raw
    s_final = min(max(s_final, 0.0), 2.0)
    struct_pct = min(1.0, s_final / MAX_RAW) * 100.0
    return StructureScore(
        s_p=s_p,
        s_c=s_c,
        s_raw=s_raw,
        s_final=s_final,
        struct_valid=report.predicate_count >= 1 and report.constraint_count >= 1,
        struct_pct=struct_pct,
    )


_SYNTAX_CHECKS = (
    re.compile(r"(?m)^\s*:-"),              # directive
    re.compile(r"library\(clpq\)"),          # constraint-library import
    re.compile(r"(?m)^\s*solve\s*\("),       # solve clause head
    re.compile(r"\{[^{}]*\}"),               # curly-brace constraint region
    re.compile(r"\.\s*(\n|$)"),              # clause terminator
)


def syntax_reward(answer: str) -> float:
    """0.2 per hallmark Prolog construct present, capped at 1.0."""
    score = sum(SYNTAX_STEP for rx in _SYNTAX_CHECKS if rx.search(answer))
    return min(score, 1.0)


def helper_script_counts(
    program: PrologProgram, swipl_path: str = "swipl", timeout: float = 10.0
) -> tuple[int, int]:
    """Compatibility oracle: run the bundled prolog_helpers.pl under
    SWI-Prolog and parse its PREDICATE_COUNT / CONSTRAINT_COUNT lines.
    """
    with tempfile.TemporaryDirectory(prefix="plgrader-helpers-") as tmp:
        prog = Path(tmp) / "prog.pl"
        prog.write_text(program.source, "utf-8")
        goal = f"analyze_code('{prog}',P,C),halt."
        proc = subprocess.run(
            [swipl_path, "-q", "-f", str(HELPERS_FILE), "-g", goal],
            capture_output=True, text=True, timeout=timeout,
        )
    pred = con = None
    for line in proc.stdout.splitlines():
        if line.startswith("PREDICATE_COUNT:"):
            pred = int(line.split(":", 1)[1])
        elif line.startswith("CONSTRAINT_COUNT:"):
            con = int(line.split(":", 1)[1])
    if pred is None or con is None:
        raise RuntimeError(
            f"helper script produced no counts (stderr: {proc.stderr.strip()!r})"
        )
    return pred, con
