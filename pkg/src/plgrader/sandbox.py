"""Sandboxed execution of candidate Prolog programs.

Each run is an isolated OS process with a wall-clock timeout. The
preferred backend is a SWI-Prolog binary (``swipl`` or a configured
path); when none is installed the bundled fallback runtime
(:mod:`plgrader.prolog`) is used with the same exit-code protocol, so
outcome classification is backend-independent.
"""

from __future__ import annotations

import re
import shutil
import subprocess
import sys
import tempfile
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from .prolog import engine as _eng

DEFAULT_TIMEOUT = 10.0
DEFAULT_GRACE = 1.0

# goal handed to swipl; mirrors the fallback runner's exit-code protocol
_SWIPL_GOAL = (
    "catch((solve(X)->(var(X)->halt(4);(write(X),nl,halt(0)));halt(4)),_,halt(2))"
)


class SandboxSetupError(Exception):
    """Host-level problem (missing interpreter), never an ExecutionOutcome."""


@dataclass
class PrologProgram:
    source: str


@dataclass
class ExecutionOutcome:
    status: str  # numeric | non_numeric | unbound_or_failed | syntax_error | timeout | empty
    value: int | float | None
    raw_stdout: str
    raw_stderr: str
    recursion_flag: bool
    wall_time: float


@dataclass
class SandboxConfig:
    swipl_path: str = "swipl"
    backend: str = "auto"  # auto | swipl | builtin
    timeout: float = DEFAULT_TIMEOUT
    grace: float = DEFAULT_GRACE
    max_in_flight: int = 4


_INT_RE = re.compile(r"^[+-]?\d+$")
_FLOAT_RE = re.compile(r"^[+-]?(\d+\.\d+([eE][+-]?\d+)?|\d+[eE][+-]?\d+)$")
_RAT_RE = re.compile(r"^([+-]?\d+)\s*(?:rdiv|r|/)\s*(\d+)$")


def parse_numeric(stdout: str):
    """Number from interpreter stdout, or None. Accepts integers,
    floats, and integer rationals (``A rdiv B``, ``ArB``, ``A/B``),
    which evaluate to a float.
    """
    s = stdout.strip()
    if _INT_RE.match(s):
        return int(s)
    if _FLOAT_RE.match(s):
        return float(s)
    m = _RAT_RE.match(s)
    if m and int(m.group(2)) != 0:
        return int(m.group(1)) / int(m.group(2))
    return None


def _term_identical(a, b):
    a, b = _eng.deref(a), _eng.deref(b)
    if a is b:
        return True
    if isinstance(a, _eng.Struct) and isinstance(b, _eng.Struct):
        return (
            a.indicator == b.indicator
            and all(_term_identical(x, y) for x, y in zip(a.args, b.args))
        )
    if isinstance(a, _eng.NUMBER_TYPES) and isinstance(b, _eng.NUMBER_TYPES):
        return type(a) is type(b) and a == b
    return False


def _body_goals(body):
    out = []
    stack = [body]
    while stack:
        g = _eng.deref(stack.pop())
        if isinstance(g, _eng.Struct) and g.name in (",", ";", "->") and len(g.args) == 2:
            stack.extend(g.args)
        else:
            out.append(g)
    return out


def detect_recursion_risk(program: PrologProgram) -> bool:
    """Advisory static flag for likely-nonterminating programs: a clause
    that calls its own head predicate, a direct two-predicate call
    cycle, or a degenerate self-unification (``T = T``). Never blocks
    execution; false positives are acceptable.
    """
    try:
        clauses = list(_eng.read_clauses(program.source))
    except _eng.PrologSyntaxError:
        return False
    edges = set()
    heads = set()
    for term in clauses:
        if isinstance(term, _eng.Struct) and term.name == ":-" and len(term.args) == 1:
            continue
        if isinstance(term, _eng.Struct) and term.name == ":-" and len(term.args) == 2:
            head, body = term.args
        else:
            head, body = term, _eng.Atom("true")
        head = _eng.deref(head)
        if isinstance(head, _eng.Struct):
            hkey = head.indicator
        elif isinstance(head, _eng.Atom):
            hkey = (head.name, 0)
        else:
            continue
        if hkey == ("=", 2) and _term_identical(head.args[0], head.args[1]):
            return True
        heads.add(hkey)
        for goal in _body_goals(body):
            if isinstance(goal, _eng.Struct):
                gkey = goal.indicator
            elif isinstance(goal, _eng.Atom):
                gkey = (goal.name, 0)
            else:
                continue
            if gkey == ("=", 2) and _term_identical(goal.args[0], goal.args[1]):
                return True
            if gkey == hkey:
                return True
            edges.add((hkey, gkey))
    for a, b in edges:
        if a != b and (b, a) in edges and b in heads:
            return True
    return False


class PrologSandbox:
    def __init__(self, config: SandboxConfig | None = None):
        self.config = config or SandboxConfig()
        self._sem = threading.Semaphore(self.config.max_in_flight)
        self._backend = self._resolve_backend()

    def _resolve_backend(self) -> str:
        mode = self.config.backend
        if mode == "swipl":
            if shutil.which(self.config.swipl_path) is None:
                raise SandboxSetupError(
                    f"SWI-Prolog binary {self.config.swipl_path!r} not found"
                )
            return "swipl"
        if mode == "builtin":
            return "builtin"
        if mode == "auto":
            if shutil.which(self.config.swipl_path) is not None:
                return "swipl"
            return "builtin"
        raise SandboxSetupError(f"unknown sandbox backend {mode!r}")

    @property
    def backend(self) -> str:
        return self._backend

    def execute(self, program: PrologProgram, timeout: float | None = None) -> ExecutionOutcome:
        timeout = self.config.timeout if timeout is None else timeout
        if timeout <= 0:
            raise ValueError("timeout must be positive")
        recursion = detect_recursion_risk(program)
        if not program.source.strip():
            return ExecutionOutcome("empty", None, "", "", recursion, 0.0)

        with self._sem:
            started = time.monotonic()
            with tempfile.TemporaryDirectory(prefix="plgrader-") as tmp:
                prog = Path(tmp) / "program.pl"
                prog.write_text(program.source, "utf-8")
                if self._backend == "swipl":
                    cmd = [self.config.swipl_path, "-q", "-f", str(prog),
                           "-g", _SWIPL_GOAL, "-t", "halt(4)"]
                else:
                    cmd = [sys.executable, "-m", "plgrader.prolog.runner", str(prog)]
                try:
                    proc = subprocess.run(
                        cmd, capture_output=True, text=True,
                        timeout=timeout, cwd=tmp,
                    )
                except subprocess.TimeoutExpired as exc:
                    wall = time.monotonic() - started
                    return ExecutionOutcome(
                        "timeout", None,
                        _as_text(exc.stdout), _as_text(exc.stderr),
                        recursion, wall,
                    )
                except FileNotFoundError as exc:
                    raise SandboxSetupError(f"interpreter missing: {exc}") from exc
            wall = time.monotonic() - started

        stdout, stderr = proc.stdout, proc.stderr
        status, value = self._classify(proc.returncode, stdout, stderr)
        return ExecutionOutcome(status, value, stdout, stderr, recursion, wall)

    @staticmethod
    def _classify(returncode: int, stdout: str, stderr: str):
        if "Syntax error" in stderr or returncode == 3:
            return "syntax_error", None
        if returncode == 0:
            value = parse_numeric(stdout)
            if value is not None:
                return "numeric", value
            return "non_numeric", None
        return "unbound_or_failed", None


def _as_text(data) -> str:
    if data is None:
        return ""
    if isinstance(data, bytes):
        return data.decode("utf-8", "replace")
    return data
