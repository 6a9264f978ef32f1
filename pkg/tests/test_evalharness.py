"""End-to-end offline evaluation with the scripted mock."""

import json

import pytest

from plgrader.dataset import DatasetRecord
from plgrader.evalharness import MMLURecord, MetricsReport, evaluate, report
from plgrader.gateway import ScriptedGateway
from plgrader.protocols import ProtocolConfig

from conftest import BUNNIES_TURN2, NATALIA, completion_for


def make_records(n=4):
    return [
        DatasetRecord.from_fields(str(i), f"question {i}", NATALIA, "#### 72")
        for i in range(n)
    ]


def test_all_correct(sandbox):
    records = make_records(3)
    gw = ScriptedGateway([completion_for(NATALIA)] * 3)
    m = evaluate(records, ProtocolConfig(protocol="single"), gw, sandbox=sandbox)
    assert m.n == 3
    assert m.acc == 100.0
    assert m.struc == 100.0
    assert m.sem > 90.0


def test_all_wrong_number(sandbox):
    records = make_records(2)
    wrong = completion_for("solve(X) :- {X = 1}.")
    gw = ScriptedGateway([wrong] * 2)
    m = evaluate(records, ProtocolConfig(protocol="single"), gw, sandbox=sandbox)
    assert m.acc == 0.0
    assert m.n == 2
    assert m.struc == 0.0  # no user predicate in the emitted code


def test_mixed_accuracy(sandbox):
    records = make_records(4)
    good = completion_for(NATALIA)
    bad = completion_for("solve(X) :- {X = 5}.")
    gw = ScriptedGateway([good, bad, good, bad])
    m = evaluate(records, ProtocolConfig(protocol="single"), gw, sandbox=sandbox)
    assert m.acc == 50.0


def test_per_example_rows(sandbox):
    records = make_records(1)
    gw = ScriptedGateway([completion_for(NATALIA)])
    m = evaluate(records, ProtocolConfig(protocol="single"), gw, sandbox=sandbox)
    (row,) = m.per_example
    assert row["id"] == "0"
    assert row["correct"]
    assert row["turns_used"] == 1
    assert 0.0 <= row["cos"] <= 1.0


def test_mmlu_mode(sandbox):
    records = [
        MMLURecord("a", "Which index?", ["wrong", "wrong", "right"], 2),
        MMLURecord("b", "Other?", ["right", "wrong"], 0),
    ]
    right = completion_for("solve(X) :- {X = 2}.")
    wrong = completion_for("solve(X) :- {X = 1}.")
    gw = ScriptedGateway([right, wrong])
    m = evaluate(records, ProtocolConfig(protocol="single"), gw, mmlu=True, sandbox=sandbox)
    assert m.acc == 50.0
    assert m.sem == 0.0  # not applicable in MMLU mode
    assert all(row["cos"] is None for row in m.per_example)


def test_mmlu_options_embedded_in_prompt(sandbox):
    records = [MMLURecord("a", "Which?", ["alpha", "beta"], 1)]
    gw = ScriptedGateway([completion_for("solve(X) :- {X = 1}.")])
    evaluate(records, ProtocolConfig(protocol="single"), gw, mmlu=True, sandbox=sandbox)
    user = dict((r, c) for r, c in gw.requests[0]["messages"])["user"]
    assert "0. alpha" in user and "1. beta" in user


def test_empty_dataset(sandbox):
    gw = ScriptedGateway([])
    m = evaluate([], ProtocolConfig(protocol="single"), gw, sandbox=sandbox)
    assert m.n == 0
    assert m.acc == 0.0


def test_report_table():
    m = MetricsReport(n=2, acc=89.87, sem=8.27, sem_alt=10.0, struc=1.60)
    text = report(m, "table")
    assert "89.87" in text
    assert "Acc" in text and "Struc" in text


def test_report_json_lines_round_trips():
    m = MetricsReport(
        n=1, acc=100.0, sem=50.0, sem_alt=40.0, struc=100.0,
        per_example=[{"id": "1", "answer": 72, "correct": True}],
    )
    lines = report(m, "json-lines").splitlines()
    rows = [json.loads(l) for l in lines]
    assert rows[0]["id"] == "1"
    assert rows[-1]["summary"] is True
    assert rows[-1]["acc"] == 100.0


def test_report_unknown_format():
    with pytest.raises(ValueError):
        report(MetricsReport(0, 0, 0, 0, 0), "xml")
