"""Line-JSON reward service: stdio handler, TCP transport, robustness."""

import io
import json
import socket
import threading

import pytest

from plgrader.rewards import RewardEngine
from plgrader.service import RewardService

from conftest import NATALIA, completion_for


@pytest.fixture(scope="module")
def service():
    return RewardService()


def request_line(suite=1, completion=None, t=1.0):
    return json.dumps({
        "completion": completion or completion_for(NATALIA),
        "reference_answer": NATALIA,
        "gold": "#### 72",
        "suite": suite,
        "progress_t": t,
    })


def test_suite1_correct_total(service):
    resp = json.loads(service.handle_request(request_line()))
    assert resp["ok"] is True
    assert resp["total"] == pytest.approx(4.5)


def test_matches_in_process_scoring(service):
    from plgrader.dataset import DatasetRecord

    line = request_line(suite=3, t=0.4)
    resp = json.loads(service.handle_request(line))
    record = DatasetRecord.from_fields("1", "", NATALIA, "#### 72")
    direct = RewardEngine().suite_score(completion_for(NATALIA), record, 3, 0.4)
    assert resp["total"] == direct.total


def test_invalid_json(service):
    resp = json.loads(service.handle_request("{broken"))
    assert resp["ok"] is False
    assert "JSON" in resp["error"]


def test_bad_suite_mentions_suite(service):
    resp = json.loads(service.handle_request(
        json.dumps({"completion": "x", "gold": "1", "suite": 9})
    ))
    assert resp["ok"] is False
    assert "suite" in resp["error"]


def test_missing_fields(service):
    resp = json.loads(service.handle_request("{}"))
    assert resp["ok"] is False
    assert "missing" in resp["error"]


def test_bad_progress_t(service):
    resp = json.loads(service.handle_request(
        json.dumps({"completion": "x", "gold": "1", "suite": 1, "progress_t": 5})
    ))
    assert resp["ok"] is False


def test_non_object_request(service):
    resp = json.loads(service.handle_request("[1,2,3]"))
    assert resp["ok"] is False


def test_stdio_order_preserving(service):
    lines = [request_line(suite=s) for s in (1, 2, 3)] + ["{bad"]
    stdin = io.StringIO("\n".join(lines) + "\n\n")
    stdout = io.StringIO()
    service.serve_stdio(stdin=stdin, stdout=stdout)
    out = stdout.getvalue().splitlines()
    assert len(out) == 4
    totals = [json.loads(l) for l in out]
    assert totals[0]["total"] == pytest.approx(4.5)
    assert totals[3]["ok"] is False


def test_tcp_round_trip(service):
    server = service.make_tcp_server(port=0)
    port = server.server_address[1]
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        with socket.create_connection(("127.0.0.1", port), timeout=10) as conn:
            payload = (request_line() + "\n" + "{bad\n").encode("utf-8")
            conn.sendall(payload)
            conn.shutdown(socket.SHUT_WR)
            data = b""
            while not data.endswith(b"\n") or data.count(b"\n") < 2:
                chunk = conn.recv(4096)
                if not chunk:
                    break
                data += chunk
        lines = data.decode("utf-8").splitlines()
        assert json.loads(lines[0])["total"] == pytest.approx(4.5)
        assert json.loads(lines[1])["ok"] is False
    finally:
        server.shutdown()
        server.server_close()
