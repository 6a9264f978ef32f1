"""Unit tests for the bundled fallback Prolog runtime."""

import pytest

from plgrader.prolog import engine as eng


def solve_str(source):
    """Consult source and query solve(X); the written form of X, or
    None on failure/unbound."""
    e = eng.Engine()
    e.consult_text(source)
    x = eng.Var("X")
    if not e.solve_once(eng.Struct("solve", [x])):
        return None
    result = eng.deref(x)
    if isinstance(result, eng.Var):
        return None
    return eng.term_to_str(result)


def test_tokenize_basic():
    toks = eng.tokenize("solve(X) :- {X = 1}.")
    assert toks[0].kind == "atom" and toks[0].value == "solve"
    assert toks[-1].kind == "end"


def test_tokenize_comments_stripped():
    toks = eng.tokenize("% comment\nfoo. /* block */ bar.")
    atoms = [t.value for t in toks if t.kind == "atom"]
    assert atoms == ["foo", "bar"]


def test_tokenize_glued_paren():
    toks = eng.tokenize("f(x), g (y)")
    parens = [t for t in toks if t.kind == "punct" and t.value == "("]
    assert parens[0].glued
    assert not parens[1].glued


def test_parse_operator_precedence():
    (clause,) = list(eng.read_clauses("t(X) :- X is 1 + 2 * 3."))
    body = clause.args[1]
    assert body.name == "is"
    assert eng.term_to_str(body.args[1]) == "1+2*3"


def test_arith_int_division_exact():
    assert solve_str("solve(X) :- X is 48 / 2.") == "24"


def test_arith_float_contagion():
    assert solve_str("solve(X) :- X is 45.0 * 2.") == "90.0"


def test_clpq_rational_arithmetic():
    # floats inside {} are rationalized, so the result is exact
    assert solve_str("solve(X) :- {X = 36 - (0.25 * 36 + 0.50 * 36)}.") == "9"


def test_clpq_division():
    assert solve_str("solve(X) :- {X = 48 / 2 + 1}.") == "25"


def test_clpq_propagation_through_facts():
    src = """
    v(10).
    solve(X) :- v(V), {Y = V * 2}, {X = Y + 1}.
    """
    assert solve_str(src) == "21"


def test_fraction_written_as_rdiv():
    assert solve_str("solve(X) :- {X = 1 / 3}.") == "1 rdiv 3"


def test_unknown_procedure_raises():
    with pytest.raises(eng.PrologError, match="Unknown procedure"):
        solve_str("solve(X) :- missing(X).")


def test_builtin_head_clause_skipped_with_warning():
    e = eng.Engine()
    e.consult_text("f(1).\nX = X.\nsolve(A) :- f(A).")
    assert any("=/2" in w for w in e.warnings)
    x = eng.Var("X")
    assert e.solve_once(eng.Struct("solve", [x]))
    assert eng.term_to_str(eng.deref(x)) == "1"


def test_syntax_error_raised():
    with pytest.raises(eng.PrologSyntaxError):
        list(eng.read_clauses("solve(X :- {X = 1}."))


def test_disjunction_and_negation():
    assert solve_str("solve(X) :- (fail ; X = 5).") == "5"
    assert solve_str("solve(X) :- \\+ fail, X = 7.") == "7"


def test_if_then_else():
    assert solve_str("solve(X) :- (1 < 2 -> X = 1 ; X = 2).") == "1"
    assert solve_str("solve(X) :- (2 < 1 -> X = 1 ; X = 2).") == "2"


def test_backtracking_over_facts():
    src = """
    p(1).
    p(2).
    solve(X) :- p(X), X > 1.
    """
    assert solve_str(src) == "2"


def test_failure_returns_none():
    assert solve_str("solve(_X) :- fail.") is None


def test_unbound_result_reported_as_none():
    assert solve_str("solve(_X).") is None


def test_term_writer_products_unspaced():
    src = ":- use_module(library(clpq)).\nsolve(X) :- X = 2.00*1.25*36."
    assert solve_str(src) == "2.0*1.25*36"
