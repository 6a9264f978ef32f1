"""Static analysis: counts, hardcode detection, structure and syntax rewards."""

import shutil

import pytest
from hypothesis import given, strategies as st

from plgrader.analyzer import (
    AnalysisReport,
    analyze,
    extract_predicate_names,
    helper_script_counts,
    structure_reward,
    syntax_reward,
)
from plgrader.sandbox import PrologProgram

from conftest import (
    BUNNIES_TURN2,
    HARDCODED,
    JENNY_TRY2,
    NATALIA,
    SELF_RECURSIVE,
)


class TestAnalyze:
    def test_natalia_counts(self):
        rep = analyze(PrologProgram(NATALIA))
        assert rep.predicate_count == 1  # sell_clips/3
        assert rep.constraint_count == 2
        assert not rep.hardcoded

    def test_bunnies_turn2_counts(self):
        rep = analyze(PrologProgram(BUNNIES_TURN2))
        assert rep.predicate_count == 0
        assert rep.constraint_count == 1

    def test_jenny_try2_counts(self):
        rep = analyze(PrologProgram(JENNY_TRY2))
        assert rep.predicate_count == 2
        assert rep.constraint_count == 0

    def test_solve_excluded_any_arity(self):
        src = "solve(X) :- {X = 1}.\nsolve(X, Y) :- {X = Y}."
        assert analyze(PrologProgram(src)).predicate_count == 0

    def test_multi_goal_region(self):
        src = "solve(X) :- {X = A + B, A = 1, B = 2}."
        assert analyze(PrologProgram(src)).constraint_count == 3

    def test_hardcoded_detected(self):
        assert analyze(PrologProgram(HARDCODED)).hardcoded

    def test_hardcoded_in_braces_detected(self):
        src = "solve(X) :- {X = 10}."
        assert analyze(PrologProgram(src)).hardcoded

    def test_symbolic_not_hardcoded(self):
        src = "v(10).\nsolve(X) :- v(V), {X = V * 2}."
        assert not analyze(PrologProgram(src)).hardcoded

    def test_predicate_names_include_solve(self):
        names = extract_predicate_names(PrologProgram(NATALIA))
        assert names == {"sell_clips", "solve"}

    def test_predicate_names_skip_directives(self):
        names = extract_predicate_names(PrologProgram(":- use_module(library(clpq)).\n"))
        assert names == set()


class TestStructureReward:
    def test_p1_c2(self):
        score = structure_reward(AnalysisReport(1, 2, False, set()))
        assert abs(score.s_raw - 0.85) < 1e-12
        assert abs(score.struct_pct - 100 * 0.85 / 1.65) < 1e-9
        assert round(score.struct_pct, 4) == 51.5152
        assert score.struct_valid

    def test_caps_reached(self):
        score = structure_reward(AnalysisReport(3, 3, False, set()))
        assert score.s_raw == 1.65
        assert score.struct_pct == 100.0

    def test_caps_not_exceeded(self):
        score = structure_reward(AnalysisReport(10, 10, False, set()))
        assert score.s_p == 0.75
        assert score.s_c == 0.90
        assert score.struct_pct == 100.0

    def test_hardcoded_scaled(self):
        clean = structure_reward(AnalysisReport(1, 2, False, set()))
        dirty = structure_reward(AnalysisReport(1, 2, True, set()))
        assert dirty.s_final == pytest.approx(clean.s_final * 0.2, abs=1e-12)

    def test_validity_needs_both(self):
        assert not structure_reward(AnalysisReport(0, 2, False, set())).struct_valid
        assert not structure_reward(AnalysisReport(2, 0, False, set())).struct_valid

    @given(st.integers(0, 50), st.integers(0, 50), st.booleans())
    def test_bounds_and_monotonicity(self, p, c, hardcoded):
        score = structure_reward(AnalysisReport(p, c, hardcoded, set()))
        assert 0.0 <= score.s_final <= 2.0
        assert 0.0 <= score.struct_pct <= 100.0
        bigger = structure_reward(AnalysisReport(p + 1, c, hardcoded, set()))
        assert bigger.s_final >= score.s_final


class TestSyntaxReward:
    def test_full_program_scores_one(self):
        assert syntax_reward(NATALIA) == 1.0

    def test_empty_scores_zero(self):
        assert syntax_reward("") == 0.0

    def test_partial_constructs(self):
        # solve head + terminator only
        assert syntax_reward("solve(X) :- X = 1.\n") == pytest.approx(0.4)

    def test_self_recursive_minimal(self):
        # solve( head + terminator
        assert syntax_reward(SELF_RECURSIVE) == pytest.approx(0.4)

    def test_capped_at_one(self):
        assert syntax_reward(NATALIA + "\n" + NATALIA) == 1.0


@pytest.mark.skipif(shutil.which("swipl") is None, reason="SWI-Prolog not installed")
class TestHelperScriptDifferential:
    def test_natalia_matches(self):
        rep = analyze(PrologProgram(NATALIA))
        p, c = helper_script_counts(PrologProgram(NATALIA))
        assert (p, c) == (rep.predicate_count, rep.constraint_count)
