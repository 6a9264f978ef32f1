"""Command-line front end: evaluate a protocol over a dataset, score a
single completion, validate/clean datasets, and run the reward service.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import dataset as ds
from .evalharness import MMLURecord, evaluate, report
from .gateway import GatewayError, HttpGateway, ScriptedGateway
from .protocols import ProtocolConfig
from .rewards import RewardEngine
from .sandbox import PrologSandbox, SandboxConfig, SandboxSetupError
from .service import RewardService


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    return json.loads(Path(path).read_text("utf-8"))


def _build_sandbox(config: dict) -> PrologSandbox:
    sb = config.get("sandbox", {})
    return PrologSandbox(SandboxConfig(
        swipl_path=sb.get("swipl_path", "swipl"),
        backend=sb.get("backend", "auto"),
        timeout=sb.get("timeout", 10.0),
        max_in_flight=sb.get("max_in_flight", 4),
    ))


def _build_protocol_cfg(args, config: dict) -> ProtocolConfig:
    cfg = ProtocolConfig(protocol=args.protocol)
    for key, value in config.get("protocol", {}).items():
        if hasattr(cfg, key):
            setattr(cfg, key, value)
    return cfg


def _build_gateway(args, config: dict):
    if getattr(args, "mock", None):
        steps = json.loads(Path(args.mock).read_text("utf-8"))
        return ScriptedGateway(steps)
    gw = config.get("gateway", {})
    return HttpGateway(
        base_url=gw.get("base_url"),
        api_key=gw.get("api_key"),
        model=gw.get("model"),
        timeout=gw.get("timeout", 120.0),
    )


def _load_mmlu(path: str) -> list[MMLURecord]:
    records = []
    for i, line in enumerate(Path(path).read_text("utf-8").splitlines(), 1):
        if not line.strip():
            continue
        obj = json.loads(line)
        records.append(MMLURecord(
            id=str(obj.get("id", i)),
            question=obj["question"],
            options=obj["options"],
            gold_index=int(obj["gold_index"]),
        ))
    return records


def cmd_eval(args) -> int:
    config = _load_config(args.config)
    sandbox = _build_sandbox(config)
    gateway = _build_gateway(args, config)
    if args.mmlu:
        records = _load_mmlu(args.dataset)
    else:
        loaded = ds.load_records(args.dataset)
        for err in loaded.errors:
            print(f"warning: {err}", file=sys.stderr)
        records = loaded.records
    metrics = evaluate(
        records,
        _build_protocol_cfg(args, config),
        gateway,
        prompt_variant=args.prompt,
        suite_for_reporting=args.suite,
        mmlu=args.mmlu,
        sandbox=sandbox,
    )
    print(report(metrics, format=args.format))
    return 0


def cmd_score(args) -> int:
    config = _load_config(args.config)
    completion = Path(args.completion).read_text("utf-8")
    record_obj = json.loads(Path(args.record).read_text("utf-8"))
    record = ds.DatasetRecord.from_fields(
        id=str(record_obj.get("id", "1")),
        question=record_obj.get("question", ""),
        prolog=record_obj.get("prolog", ""),
        answer=record_obj.get("answer", ""),
    )
    engine = RewardEngine(sandbox=_build_sandbox(config))
    breakdown = engine.suite_score(completion, record, args.suite, args.t)
    print(json.dumps({
        "suite": breakdown.suite,
        "total": breakdown.total,
        "components": breakdown.components,
        "normalized": breakdown.normalized,
        "weights": breakdown.weights,
    }, sort_keys=True, indent=2))
    return 0


def cmd_validate(args) -> int:
    config = _load_config(args.config)
    sandbox = _build_sandbox(config)
    loaded = ds.load_records(args.dataset)
    for err in loaded.errors:
        print(f"warning: {err}", file=sys.stderr)
    for record in loaded.records:
        rep = ds.validate_record(record, sandbox)
        print(json.dumps({
            "id": rep.id,
            "status": rep.status,
            "computed": rep.computed,
            "gold": rep.gold,
        }, sort_keys=True))
    return 0


def cmd_clean(args) -> int:
    config = _load_config(args.config)
    summary = ds.clean_dataset(args.dataset, args.output, sandbox=_build_sandbox(config))
    print(json.dumps({
        "total": summary.total,
        "consistent": summary.consistent,
        "gold_errors": summary.gold_errors,
        "reference_errors": summary.reference_errors,
        "skipped_lines": summary.skipped_lines,
    }, sort_keys=True))
    return 0


def cmd_serve(args) -> int:
    config = _load_config(args.config)
    service = RewardService(RewardEngine(sandbox=_build_sandbox(config)))
    if args.tcp is not None:
        server = service.make_tcp_server(port=args.tcp)
        host, port = server.server_address[:2]
        print(f"listening on {host}:{port}", file=sys.stderr)
        with server:
            server.serve_forever()
        return 0
    service.serve_stdio()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plgrader",
        description="Grade and evaluate LLM-emitted Prolog programs.",
    )
    parser.add_argument("--config", help="JSON config file", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="run a protocol over a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--protocol", default="single",
                   choices=["single", "multiple", "agentic_internal", "agentic_independent"])
    p.add_argument("--prompt", default="sp-struct",
                   choices=["sp-base", "sp-struct", "sp-declare", "sp-reflect"])
    p.add_argument("--mmlu", action="store_true")
    p.add_argument("--mock", help="JSON file with scripted mock responses")
    p.add_argument("--suite", type=int, choices=[1, 2, 3], default=None)
    p.add_argument("--format", default="table", choices=["table", "json-lines"])
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("score", help="score one completion against one record")
    p.add_argument("--completion", required=True)
    p.add_argument("--record", required=True)
    p.add_argument("--suite", type=int, choices=[1, 2, 3], required=True)
    p.add_argument("--t", type=float, default=1.0)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("validate", help="validate reference programs against golds")
    p.add_argument("dataset")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("clean", help="rewrite gold tails that disagree with references")
    p.add_argument("dataset")
    p.add_argument("output")
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("serve", help="run the line-JSON reward service")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--stdio", action="store_true", default=True)
    group.add_argument("--tcp", type=int, metavar="PORT", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GatewayError, SandboxSetupError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
