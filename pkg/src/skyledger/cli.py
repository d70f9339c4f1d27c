"""Command-line front end.

    skyledger run --scenario demo.scenario.json --out outdir [--seed N] [--quiet]
    skyledger verify <chain.jsonl>
    skyledger inspect <state.json> <query>
    skyledger demo <name>

Exit codes: 0 success, 2 config/parse error, 3 runtime scenario
failure, 4 broken chain.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import Any

from . import persistence
from .ledger import canonical_json
from .sim import DroneSpec, MissionSpec, ReporterSpec, Scenario, ScenarioError, World

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_BROKEN_CHAIN = 4

DEMO_NAMES = ("register", "subscribe", "quote", "plan", "report", "complete", "full")
_DEMO_OPS = {
    "register": "register_drone",
    "subscribe": "subscribe",
    "quote": "request_quote",
    "plan": "request_plan",
    "report": "report_drone",
    "complete": "report_completion",
}

INSPECT_QUERIES = ("accounts", "account:<id>", "drones", "plans", "supply", "reputation")


def builtin_demo_scenario() -> Scenario:
    """One compliant mission watched by a single bystander."""
    return Scenario(
        name="builtin-demo",
        seed=7,
        duration_ticks=40,
        drones=(
            DroneSpec(
                name="demo-drone",
                serial="SN-DEMO-1",
                owner_national_id="NID-DEMO-1",
                mission=MissionSpec(
                    source="+000°00′10″ +000°00′10″",
                    destination="+000°00′10″ +000°01′00″",
                    departure_date="01012025",
                    departure_time="0001",
                ),
            ),
        ),
        reporters=(ReporterSpec(name="demo-reporter", cell=(3, 8), sensing_range_m=200),),
    )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="skyledger", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario and write its artifacts")
    p_run.add_argument("--scenario", required=True, help="path to *.scenario.json")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p_run.add_argument("--quiet", action="store_true", help="suppress the summary table")

    p_verify = sub.add_parser("verify", help="check a chain log's hashes and links")
    p_verify.add_argument("chain", help="path to *.chain.jsonl")

    p_inspect = sub.add_parser("inspect", help="query a state snapshot")
    p_inspect.add_argument("state", help="path to *.state.json")
    p_inspect.add_argument("query", help="one of: " + ", ".join(INSPECT_QUERIES))

    p_demo = sub.add_parser("demo", help="print a canned protocol transaction")
    p_demo.add_argument("name", help="one of: " + ", ".join(DEMO_NAMES))

    args = parser.parse_args(argv)
    if args.command == "run":
        return _cmd_run(args.scenario, args.out, args.seed, args.quiet)
    if args.command == "verify":
        return _cmd_verify(args.chain)
    if args.command == "inspect":
        return _cmd_inspect(args.state, args.query)
    return _cmd_demo(args.name)


def _fail(code: int, message: str) -> int:
    print(message, file=sys.stderr)
    return code


def _cmd_run(scenario_path: str, out_dir: str, seed: int | None, quiet: bool) -> int:
    try:
        scenario = persistence.load_scenario(scenario_path)
    except FileNotFoundError:
        return _fail(EXIT_CONFIG, f"scenario not found: {scenario_path}")
    except json.JSONDecodeError as exc:
        return _fail(EXIT_CONFIG, f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    except ScenarioError as exc:
        return _fail(EXIT_CONFIG, f"invalid scenario: {exc}")
    if seed is not None:
        scenario = dataclasses.replace(scenario, seed=seed)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        world = World(scenario)
        world.run_to_end()
        metrics = world.metrics()
        name = scenario.name
        persistence.write_metrics(out / f"{name}.metrics.json", metrics)
        persistence.write_chain_jsonl(out / f"{name}.chain.jsonl", world.ledger.blocks)
        persistence.write_trace_csv(out / f"{name}.trace.csv", world)
        persistence.write_events_jsonl(out / f"{name}.events.jsonl", world.ledger.blocks)
        (out / f"{name}.state.json").write_bytes(persistence.snapshot_world(world))
        persistence.write_reputation_surface_csv(out / "reputation_surface.csv")
        persistence.write_congestion_fee_csv(out / "congestion_fee.csv", scenario)
    except Exception as exc:  # noqa: BLE001 -- CLI boundary maps failures to exit 3
        return _fail(EXIT_RUNTIME, f"scenario failed: {exc}")

    if not quiet:
        _print_summary(metrics)
    return EXIT_OK


def _print_summary(metrics) -> None:
    print(f"blocks {metrics.blocks}  txs {metrics.transactions}  chain head {metrics.chain_head[:16]}…")
    print(f"supply {metrics.genesis_supply} -> {metrics.final_supply}")
    if metrics.missions:
        print(f"{'drone':>6} {'operator':>14} {'payout':>8} {'r':>3} {'p':>3} {'R(micro)':>10} {'k(micro)':>10}")
        for m in metrics.missions:
            print(
                f"{m['droneId']:>6} {m['operator'][:12]:>14} {m['payout']:>8}"
                f" {m['rewards']:>3} {m['penalties']:>3} {m['reputationMicro']:>10} {m['kMicro']:>10}"
            )
    if metrics.revert_counts:
        print("reverts:", ", ".join(f"{k} x{v}" for k, v in sorted(metrics.revert_counts.items())))


def _cmd_verify(chain_path: str) -> int:
    try:
        ok, bad_index = persistence.verify_chain_file(chain_path)
    except FileNotFoundError:
        return _fail(EXIT_CONFIG, f"chain log not found: {chain_path}")
    except (persistence.CorruptPayload, persistence.SchemaMismatch) as exc:
        return _fail(EXIT_CONFIG, f"cannot parse chain log: {exc}")
    if not ok:
        return _fail(EXIT_BROKEN_CHAIN, f"chain broken at block {bad_index}")
    print("chain OK")
    return EXIT_OK


def _cmd_inspect(state_path: str, query: str) -> int:
    try:
        data = json.loads(Path(state_path).read_bytes())
    except FileNotFoundError:
        return _fail(EXIT_CONFIG, f"state snapshot not found: {state_path}")
    except json.JSONDecodeError as exc:
        return _fail(EXIT_CONFIG, f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(data, dict) or data.get("kind") != "state" \
            or data.get("schema", {}).get("major") != persistence.SCHEMA["major"]:
        return _fail(EXIT_CONFIG, "not a readable state snapshot")

    result: Any
    if query == "accounts":
        result = data["accounts"]
    elif query.startswith("account:"):
        wanted = query.split(":", 1)[1]
        matches = [a for a in data["accounts"] if a["id"] == wanted]
        if not matches:
            return _fail(EXIT_CONFIG, f"no such account: {wanted}")
        result = matches[0]
    elif query == "drones":
        result = data["authority"]["records"]
    elif query == "plans":
        result = data["uss"]["plans"]
    elif query == "supply":
        result = {"total": str(sum(int(a["balance"]) for a in data["accounts"]))}
    elif query == "reputation":
        result = data["uss"]["reputation"]
    else:
        return _fail(EXIT_CONFIG, f"unknown query {query!r}; expected one of: " + ", ".join(INSPECT_QUERIES))
    print(canonical_json(result).decode())
    return EXIT_OK


def _cmd_demo(name: str) -> int:
    if name not in DEMO_NAMES:
        return _fail(EXIT_CONFIG, f"unknown demo {name!r}; expected one of: " + ", ".join(DEMO_NAMES))
    world = World(builtin_demo_scenario())
    world.run_to_end()
    wanted = list(_DEMO_OPS.values()) if name == "full" else [_DEMO_OPS[name]]
    shown = set()
    for block in world.ledger.blocks:
        for tx in block.transactions:
            if tx.op in wanted and tx.op not in shown and tx.status == "success":
                shown.add(tx.op)
                _print_tx(world, tx)
    missing = [op for op in wanted if op not in shown]
    if missing:
        return _fail(EXIT_RUNTIME, f"demo did not execute: {', '.join(missing)}")
    return EXIT_OK


def _print_tx(world: World, tx) -> None:
    to = world.authority.account if tx.op in ("register_drone", "get_drone") else world.uss.treasury
    print(f"transaction #{tx.tx_id} [{tx.op}]")
    print(f"  status          {tx.status}")
    print(f"  from            {tx.caller}")
    print(f"  to              {to}")
    print(f"  function        {tx.op}")
    print(f"  value           {tx.value}")
    print(f"  decoded input   {canonical_json(tx.args).decode()}")
    print(f"  decoded output  {canonical_json(tx.payload).decode()}")
    if tx.events:
        print(f"  logs            {canonical_json(tx.events).decode()}")
    print()


if __name__ == "__main__":
    sys.exit(main())
