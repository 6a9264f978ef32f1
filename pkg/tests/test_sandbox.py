"""Sandbox execution goldens and outcome classification."""

import pytest

from plgrader.sandbox import (
    PrologProgram,
    PrologSandbox,
    SandboxConfig,
    SandboxSetupError,
    detect_recursion_risk,
    parse_numeric,
)

from conftest import (
    BUNNIES_TURN1,
    BUNNIES_TURN2,
    HARDCODED,
    JENNY_TRY1,
    JENNY_TRY2,
    NATALIA,
    NON_NUMERIC,
    SELF_RECURSIVE,
)


class TestParseNumeric:
    def test_integer(self):
        assert parse_numeric("72\n") == 72

    def test_float(self):
        assert parse_numeric("90.0") == 90.0

    def test_rationals(self):
        assert parse_numeric("3 rdiv 4") == 0.75
        assert parse_numeric("3r4") == 0.75
        assert parse_numeric("3/4") == 0.75

    def test_non_numeric(self):
        assert parse_numeric("2.0*1.25*36") is None
        assert parse_numeric("") is None
        assert parse_numeric("hello") is None


class TestExecution:
    def test_natalia_numeric_72(self, sandbox):
        out = sandbox.execute(PrologProgram(NATALIA))
        assert out.status == "numeric"
        assert out.value == 72

    def test_bunnies_turn2_exact_9(self, sandbox):
        out = sandbox.execute(PrologProgram(BUNNIES_TURN2))
        assert out.status == "numeric"
        assert out.value == 9

    def test_jenny_try2_float_90(self, sandbox):
        out = sandbox.execute(PrologProgram(JENNY_TRY2))
        assert out.status == "numeric"
        assert out.value == 90.0
        assert out.recursion_flag

    def test_bunnies_turn1_unbound(self, sandbox):
        out = sandbox.execute(PrologProgram(BUNNIES_TURN1))
        assert out.status == "unbound_or_failed"

    def test_jenny_try1_unbound(self, sandbox):
        out = sandbox.execute(PrologProgram(JENNY_TRY1))
        assert out.status == "unbound_or_failed"

    def test_symbolic_result_non_numeric(self, sandbox):
        out = sandbox.execute(PrologProgram(NON_NUMERIC))
        assert out.status == "non_numeric"
        assert out.raw_stdout.strip() == "2.0*1.25*36"

    def test_self_recursive_times_out(self, quick_sandbox):
        out = quick_sandbox.execute(PrologProgram(SELF_RECURSIVE))
        assert out.status == "timeout"
        assert out.recursion_flag

    def test_empty_program(self, sandbox):
        out = sandbox.execute(PrologProgram("   \n"))
        assert out.status == "empty"

    def test_syntax_error(self, sandbox):
        out = sandbox.execute(PrologProgram("solve(X :- {X = 1}."))
        assert out.status == "syntax_error"

    def test_hardcoded_still_numeric(self, sandbox):
        out = sandbox.execute(PrologProgram(HARDCODED))
        assert out.status == "numeric"
        assert out.value == 10

    def test_invalid_timeout_rejected(self, sandbox):
        with pytest.raises(ValueError):
            sandbox.execute(PrologProgram(NATALIA), timeout=0)


class TestRecursionFlag:
    def test_direct_self_recursion(self):
        assert detect_recursion_risk(PrologProgram(SELF_RECURSIVE))

    def test_same_indicator_reuse(self):
        assert detect_recursion_risk(PrologProgram(BUNNIES_TURN1))

    def test_degenerate_self_unification(self):
        assert detect_recursion_risk(PrologProgram(JENNY_TRY2))

    def test_mutual_cycle(self):
        src = "a(X) :- b(X).\nb(X) :- a(X).\nsolve(X) :- a(X)."
        assert detect_recursion_risk(PrologProgram(src))

    def test_clean_program_not_flagged(self):
        assert not detect_recursion_risk(PrologProgram(NATALIA))
        assert not detect_recursion_risk(PrologProgram(BUNNIES_TURN2))

    def test_unparseable_not_flagged(self):
        assert not detect_recursion_risk(PrologProgram("solve(X :- ."))


class TestBackendSelection:
    def test_explicit_missing_swipl_is_setup_error(self):
        with pytest.raises(SandboxSetupError):
            PrologSandbox(SandboxConfig(backend="swipl", swipl_path="definitely-not-swipl"))

    def test_unknown_backend_rejected(self):
        with pytest.raises(SandboxSetupError):
            PrologSandbox(SandboxConfig(backend="mystery"))

    def test_auto_resolves(self, sandbox):
        assert sandbox.backend in ("swipl", "builtin")
