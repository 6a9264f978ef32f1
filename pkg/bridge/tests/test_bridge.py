"""Bridge round-trip against the reward service.

The direct-response oracle imports the grading library, but the bridge
under test talks only to the service subprocess / socket.
"""

import json
import random
import threading

import pytest

from rewardbridge import BridgeConfig, RewardBridge

# oracle only — the bridge itself never imports plgrader
from plgrader.rewards import RewardEngine
from plgrader.service import RewardService

NATALIA = """\
:- use_module(library(clpq)).

sell_clips(natalia, april, 48).

solve(Total) :-
    sell_clips(natalia, april, April),
    { May   = April / 2 },
    { Total = April + May }.
"""


def completion_for(program):
    return f"<reasoning>\nr\n</reasoning>\n<answer>\n{program.strip()}\n</answer>"


def random_payloads(n, seed=20260823):
    rng = random.Random(seed)
    programs = [
        NATALIA,
        "solve(X) :- {X = 72}.",
        "solve(X) :- X = 2.00*1.25*36.",
        "solve(X :- broken",
        "",
    ]
    payloads = []
    for _ in range(n):
        program = rng.choice(programs)
        completion = (
            completion_for(program) if rng.random() < 0.8 else program or "plain text"
        )
        payloads.append({
            "completion": completion,
            "reference": NATALIA if rng.random() < 0.7 else "",
            "gold": rng.choice(["#### 72", "#### 9", "90.0", "no number"]),
            "t": round(rng.random(), 3),
        })
    return payloads


def direct_lines(payloads, suite):
    service = RewardService(RewardEngine())
    lines = []
    for p in payloads:
        req = json.dumps({
            "completion": p["completion"],
            "reference_answer": p["reference"],
            "gold": p["gold"],
            "suite": suite,
            "progress_t": p["t"],
        })
        lines.append(service.handle_request(req))
    return lines


class TestConfig:
    def test_defaults_valid(self):
        cfg = BridgeConfig()
        assert cfg.mode == "spawn-stdio"
        assert cfg.suite == 3

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            BridgeConfig(mode="carrier-pigeon")

    def test_bad_suite(self):
        with pytest.raises(ValueError):
            BridgeConfig(suite=4)

    def test_bad_timeout(self):
        with pytest.raises(ValueError):
            BridgeConfig(timeout=0)


class TestSpawnStdio:
    def test_empty_batch(self):
        with RewardBridge(BridgeConfig(suite=1)) as bridge:
            assert bridge.score_batch([], [], []) == []

    def test_single_correct_total(self):
        with RewardBridge(BridgeConfig(suite=1)) as bridge:
            (resp,) = bridge.score_batch(
                [completion_for(NATALIA)], [NATALIA], ["#### 72"]
            )
        assert resp.ok
        assert resp.total == pytest.approx(4.5)

    def test_malformed_item_isolated(self):
        with RewardBridge(BridgeConfig(suite=1)) as bridge:
            good = completion_for(NATALIA)
            responses = bridge.score_batch(
                [good, "", good], [NATALIA] * 3, ["#### 72"] * 3
            )
        assert [r.ok for r in responses] == [True, True, True]
        assert responses[0].total == pytest.approx(4.5)
        assert responses[1].total < responses[0].total

    def test_mismatched_lengths(self):
        with RewardBridge(BridgeConfig(suite=1)) as bridge:
            with pytest.raises(ValueError):
                bridge.score_batch(["a"], [], [])

    def test_unreachable_spawn_raises_before_scoring(self):
        with pytest.raises(ConnectionError):
            RewardBridge(BridgeConfig(endpoint="definitely-not-a-real-binary --x"))


class TestConnectTcp:
    @pytest.fixture()
    def tcp_server(self):
        service = RewardService(RewardEngine())
        server = service.make_tcp_server(port=0)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        yield server.server_address
        server.shutdown()
        server.server_close()

    def test_round_trip(self, tcp_server):
        host, port = tcp_server[:2]
        cfg = BridgeConfig(mode="connect-tcp", endpoint=f"{host}:{port}", suite=2)
        with RewardBridge(cfg) as bridge:
            (resp,) = bridge.score_batch(
                [completion_for(NATALIA)], [NATALIA], ["#### 72"]
            )
        assert resp.ok

    def test_unreachable_raises_before_scoring(self):
        cfg = BridgeConfig(mode="connect-tcp", endpoint="127.0.0.1:1", timeout=0.5)
        with pytest.raises(ConnectionError):
            RewardBridge(cfg)


class TestAcceptanceRoundTrip:
    def test_100_randomized_payloads_byte_equal(self):
        """Bridge responses equal direct service output byte-for-byte."""
        payloads = random_payloads(100)
        suite = 3
        expected = direct_lines(payloads, suite)
        with RewardBridge(BridgeConfig(suite=suite)) as bridge:
            got = []
            for p in payloads:
                (resp,) = bridge.score_batch(
                    [p["completion"]], [p["reference"]], [p["gold"]], progress_t=p["t"]
                )
                got.append(resp.raw)
        assert got == expected
