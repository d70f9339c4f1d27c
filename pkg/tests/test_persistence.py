import json

import pytest

from conftest import compliant_scenario, deviating_scenario
from skyledger import persistence
from skyledger.ledger import canonical_json
from skyledger.sim import World, run


def test_snapshot_is_canonical():
    world = World(compliant_scenario())
    assert persistence.snapshot_world(world) == persistence.snapshot_world(world)


def test_snapshot_restore_round_trip_bytes():
    world = World(compliant_scenario())
    snap = persistence.snapshot_world(world)
    again = persistence.snapshot_world(persistence.restore_world(snap))
    assert again == snap


def test_snapshot_restore_after_full_run():
    _, world = run(deviating_scenario())
    snap = persistence.snapshot_world(world)
    restored = persistence.restore_world(snap)
    assert restored.ledger.state_digest() == world.ledger.state_digest()
    assert restored.ledger.chain_head_hex() == world.ledger.chain_head_hex()
    assert persistence.snapshot_world(restored) == snap


def test_checkpoint_resume_equals_straight_through():
    straight = World(compliant_scenario())
    straight.run_to_end()

    interrupted = World(compliant_scenario())
    while interrupted.tick < 15:
        interrupted.step()
    resumed = persistence.restore_world(persistence.snapshot_world(interrupted))
    resumed.run_to_end()

    assert resumed.ledger.chain_head_hex() == straight.ledger.chain_head_hex()
    assert resumed.ledger.state_digest() == straight.ledger.state_digest()
    assert canonical_json(resumed.metrics().to_dict()) == canonical_json(straight.metrics().to_dict())


def test_snapshot_refuses_unsealed_state():
    world = World(compliant_scenario())
    world.ledger.clock = 0
    world.ledger.submit(world.drones[0].operator_account, "request_quote", {"droneId": 0})
    with pytest.raises(ValueError, match="seal pending"):
        persistence.snapshot_world(world)


def test_truncated_snapshot_is_corrupt():
    world = World(compliant_scenario())
    snap = persistence.snapshot_world(world)
    with pytest.raises(persistence.CorruptPayload):
        persistence.restore_world(snap[: len(snap) // 2])


def test_garbage_snapshot_is_corrupt():
    with pytest.raises(persistence.CorruptPayload):
        persistence.restore_world(b"not even json")
    with pytest.raises(persistence.CorruptPayload):
        persistence.restore_world(b'{"schema": {"major": 1}, "kind": "state"}')


def test_unknown_major_version_rejected():
    world = World(compliant_scenario())
    data = json.loads(persistence.snapshot_world(world))
    data["schema"]["major"] = 99
    with pytest.raises(persistence.SchemaMismatch):
        persistence.restore_world(canonical_json(data))


def test_nonces_survive_a_round_trip_but_never_in_the_clear():
    _, world = run(compliant_scenario(n_reporters=0, seed=31))
    mid = World(compliant_scenario(n_reporters=0, seed=31))
    while mid.tick < 10:
        mid.step()
    nonces = dict(mid.uss.storage["nonces"])
    assert nonces, "mission should still be active at tick 10"
    snap = persistence.snapshot_world(mid)
    for nonce in nonces.values():
        assert nonce.hex().encode() not in snap
    restored = persistence.restore_world(snap)
    assert restored.uss.storage["nonces"] == nonces


def test_plan_exports_never_contain_nonces():
    world = World(compliant_scenario())
    nonce_hexes = [n.hex() for n in world.uss.storage["nonces"].values()]
    dump = json.dumps(world.uss.export_active_plans())
    for nonce_hex in nonce_hexes:
        assert nonce_hex not in dump


class TestChainFiles:
    def test_round_trip_and_verify(self, tmp_path):
        _, world = run(compliant_scenario())
        path = tmp_path / "x.chain.jsonl"
        persistence.write_chain_jsonl(path, world.ledger.blocks)
        blocks = persistence.read_chain_jsonl(path)
        assert blocks == world.ledger.blocks
        assert persistence.verify_chain_file(path) == (True, None)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.chain.jsonl"
        path.write_bytes(b"")
        with pytest.raises(persistence.CorruptPayload):
            persistence.read_chain_jsonl(path)

    def test_bad_header_major(self, tmp_path):
        path = tmp_path / "bad.chain.jsonl"
        path.write_bytes(b'{"schema":{"major":9,"minor":0},"kind":"chain"}\n')
        with pytest.raises(persistence.SchemaMismatch):
            persistence.read_chain_jsonl(path)

    def test_mangled_block_line(self, tmp_path):
        path = tmp_path / "mangled.chain.jsonl"
        path.write_bytes(
            b'{"schema":{"major":1,"minor":0},"kind":"chain"}\n{"index":0}\n'
        )
        with pytest.raises(persistence.CorruptPayload):
            persistence.read_chain_jsonl(path)


class TestScenarioFiles:
    def test_save_load_round_trip(self, tmp_path):
        scenario = compliant_scenario()
        path = tmp_path / "x.scenario.json"
        persistence.save_scenario(path, scenario)
        assert persistence.load_scenario(path) == scenario

    def test_bundled_demo_loads(self, demo_scenario_path):
        scenario = persistence.load_scenario(demo_scenario_path)
        assert scenario.name == "demo"
        assert len(scenario.drones) == 4
        behaviors = {d.behavior for d in scenario.drones}
        assert behaviors == {"compliant", "deviating", "silent", "forger"}


class TestCsvOutputs:
    def test_trace_columns(self, tmp_path):
        _, world = run(compliant_scenario())
        path = tmp_path / "trace.csv"
        persistence.write_trace_csv(path, world)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "tick,droneId,cellLat,cellLon,broadcast"
        assert len(lines) > 1
        tick, drone_id, lat, lon, broadcast = lines[1].split(",")
        assert int(tick) >= 0 and int(drone_id) == 0
        bytes.fromhex(broadcast)  # hex payload decodes

    def test_reputation_surface(self, tmp_path):
        path = tmp_path / "surface.csv"
        persistence.write_reputation_surface_csv(path, 5, 5)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "rewards,penalties,reputationMicro"
        assert len(lines) == 1 + 6 * 6
        assert lines[1] == "0,0,0"

    def test_congestion_fee_curve(self, tmp_path):
        path = tmp_path / "fees.csv"
        persistence.write_congestion_fee_csv(path, compliant_scenario(), max_missions=10)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "activeMissions,fee"
        fees = [int(line.split(",")[1]) for line in lines[1:]]
        assert fees == sorted(fees) and len(fees) == 11

    def test_events_stream(self, tmp_path):
        _, world = run(compliant_scenario())
        path = tmp_path / "events.jsonl"
        persistence.write_events_jsonl(path, world.ledger.blocks)
        lines = [json.loads(l) for l in path.read_text().strip().splitlines()]
        assert lines[0]["kind"] == "events"
        names = {e.get("name") for e in lines[1:]}
        assert names == {"DroneSighted", "missionComplete"}
        assert all("txId" in e for e in lines[1:])
