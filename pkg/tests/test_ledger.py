import random

import pytest

import oracles
from skyledger.ledger import (
    Block,
    ContractRevert,
    GENESIS_PREV_HASH,
    InsufficientBalance,
    Ledger,
    LedgerError,
    TransactionRecord,
    UnknownAccount,
    canonical_json,
    verify_blocks,
)


class ToyContract:
    """Minimal op set to exercise submit/revert semantics in isolation."""

    def __init__(self, ledger: Ledger):
        self.ledger = ledger
        self.vault = ledger.create_account("uss")
        self.storage = {"slots": {}}
        ledger.attach_storage("toy", self.storage)
        ledger.register_op("set_slot", self.op_set, payable=True, receiver=self.vault)
        ledger.register_op("peek", self.op_peek, view=True)
        ledger.register_op("set_then_fail", self.op_set_then_fail)
        ledger.register_op("pay_out", self.op_pay_out)

    def op_set(self, caller, args):
        self.storage["slots"][args["key"]] = args["value"]
        self.ledger.emit("SlotSet", key=args["key"])
        return {"key": args["key"]}

    def op_peek(self, caller, args):
        return {"value": self.storage["slots"].get(args["key"])}

    def op_set_then_fail(self, caller, args):
        self.storage["slots"]["poisoned"] = True
        raise ContractRevert("toy-failure")

    def op_pay_out(self, caller, args):
        self.ledger.transfer(self.vault, caller, args["amount"])
        return {}


@pytest.fixture
def toy():
    ledger = Ledger()
    contract = ToyContract(ledger)
    alice = ledger.create_account("operator", 1000)
    bob = ledger.create_account("reporter")
    ledger.genesis(note="toy")
    return ledger, contract, alice, bob


class TestAccounts:
    def test_create_account_defaults(self):
        ledger = Ledger()
        acc = ledger.create_account("operator")
        assert ledger.balance(acc) == 0
        assert ledger.account(acc).role == "operator"

    def test_ids_unique(self):
        ledger = Ledger()
        ids = {ledger.create_account("operator") for _ in range(50)}
        assert len(ids) == 50

    def test_uss_role_account(self):
        ledger = Ledger()
        acc = ledger.create_account("uss", 10)
        assert ledger.account(acc).role == "uss"

    def test_unknown_role_rejected(self):
        with pytest.raises(ValueError):
            Ledger().create_account("wizard")

    def test_unknown_account_raises(self):
        with pytest.raises(UnknownAccount):
            Ledger().balance("0x" + "00" * 20)


class TestTransfer:
    def test_zero_amount_is_noop(self, toy):
        ledger, _, alice, bob = toy
        ledger.transfer(alice, bob, 0)
        assert ledger.balance(alice) == 1000
        assert ledger.balance(bob) == 0

    def test_moves_funds(self, toy):
        ledger, _, alice, bob = toy
        ledger.transfer(alice, bob, 5)
        assert ledger.balance(alice) == 995
        assert ledger.balance(bob) == 5

    def test_insufficient(self, toy):
        ledger, _, alice, bob = toy
        with pytest.raises(InsufficientBalance):
            ledger.transfer(bob, alice, 1)

    def test_conservation_over_random_transfers(self, toy):
        ledger, _, alice, bob = toy
        total = ledger.total_supply()
        rng = random.Random(8)
        accounts = list(ledger.accounts)
        for _ in range(500):
            src, dst = rng.choice(accounts), rng.choice(accounts)
            amount = rng.randrange(0, 50)
            try:
                ledger.transfer(src, dst, amount)
            except InsufficientBalance:
                pass
            assert ledger.total_supply() == total


class TestSubmit:
    def test_success_appends_log_with_matching_result(self, toy):
        ledger, _, alice, _ = toy
        before = len(ledger.pending)
        rec = ledger.submit(alice, "set_slot", {"key": "a", "value": 1})
        assert rec.status == "success"
        assert rec.payload == {"key": "a"}
        assert len(ledger.pending) == before + 1
        assert ledger.pending[-1] is rec

    def test_value_over_balance_reverts_unchanged(self, toy):
        ledger, contract, alice, _ = toy
        digest = ledger.state_digest()
        rec = ledger.submit(alice, "set_slot", {"key": "a", "value": 1}, value=10_000)
        assert rec.status == "revert"
        assert rec.reason == "insufficient-balance"
        assert ledger.balance(alice) == 1000
        assert ledger.state_digest() == digest

    def test_unknown_operation_reverts(self, toy):
        ledger, _, alice, _ = toy
        rec = ledger.submit(alice, "no_such_op", {})
        assert rec.status == "revert"
        assert rec.reason == "unknown-operation"

    def test_value_to_non_payable_reverts(self, toy):
        ledger, _, alice, _ = toy
        rec = ledger.submit(alice, "peek", {"key": "a"}, value=1)
        assert (rec.status, rec.reason) == ("revert", "not-payable")

    def test_unknown_caller_is_an_error_not_a_revert(self, toy):
        ledger, _, _, _ = toy
        with pytest.raises(UnknownAccount):
            ledger.submit("0x" + "11" * 20, "peek", {"key": "a"})

    def test_revert_rolls_back_storage_and_value(self, toy):
        ledger, contract, alice, _ = toy
        digest = ledger.state_digest()
        rec = ledger.submit(alice, "set_then_fail", {})
        assert (rec.status, rec.reason) == ("revert", "toy-failure")
        assert "poisoned" not in contract.storage["slots"]
        assert ledger.state_digest() == digest
        assert rec.events == []
        assert rec.balance_deltas == {}

    def test_internal_insufficient_balance_becomes_revert(self, toy):
        ledger, contract, alice, _ = toy
        digest = ledger.state_digest()
        rec = ledger.submit(alice, "pay_out", {"amount": 10**9})
        assert (rec.status, rec.reason) == ("revert", "insufficient-balance")
        assert ledger.state_digest() == digest

    def test_events_recorded_on_success(self, toy):
        ledger, _, alice, _ = toy
        rec = ledger.submit(alice, "set_slot", {"key": "k", "value": 2})
        assert rec.events == [{"name": "SlotSet", "args": {"key": "k"}}]

    def test_balance_deltas_sum_to_zero(self, toy):
        ledger, contract, alice, _ = toy
        rec = ledger.submit(alice, "set_slot", {"key": "k", "value": 2}, value=7)
        assert sum(rec.balance_deltas.values()) == 0
        assert rec.balance_deltas[alice] == -7
        assert rec.balance_deltas[contract.vault] == 7

    def test_view_op_has_zero_state_writes(self, toy):
        ledger, _, alice, _ = toy
        rec = ledger.submit(alice, "peek", {"key": "a"})
        assert rec.state_writes == 0

    def test_tx_ids_strictly_increase(self, toy):
        ledger, _, alice, _ = toy
        ids = [ledger.submit(alice, "peek", {"key": "a"}).tx_id for _ in range(5)]
        assert ids == sorted(ids) and len(set(ids)) == 5


class TestBlocks:
    def test_genesis_block_zero_prev(self, toy):
        ledger, _, _, _ = toy
        block = ledger.seal_block()
        assert block.index == 0
        assert block.prev_hash == GENESIS_PREV_HASH

    def test_chain_links(self, toy):
        ledger, _, alice, _ = toy
        b0 = ledger.seal_block()
        ledger.submit(alice, "peek", {"key": "a"})
        b1 = ledger.seal_block()
        assert b1.prev_hash == b0.hash
        assert ledger.verify_chain()

    def test_empty_seal_rejected_unless_configured(self, toy):
        ledger, _, _, _ = toy
        ledger.seal_block()
        with pytest.raises(LedgerError):
            ledger.seal_block()
        relaxed = Ledger(allow_empty_blocks=True)
        block = relaxed.seal_block()
        assert block.transactions == []

    def test_digests_match_independent_recomputation(self, toy):
        ledger, _, alice, _ = toy
        for i in range(3):
            ledger.submit(alice, "set_slot", {"key": f"k{i}", "value": i})
            ledger.seal_block()
        dicts = [b.to_dict() for b in ledger.blocks]
        assert oracles.independent_chain_check(dicts)
        for blk in dicts:
            assert oracles.independent_block_digest(blk) == blk["hash"]

    def test_tamper_one_tx_breaks_chain(self, toy):
        ledger, _, alice, _ = toy
        ledger.submit(alice, "set_slot", {"key": "a", "value": 1})
        ledger.seal_block()
        assert ledger.verify_chain()
        ledger.blocks[0].transactions[-1].args["value"] = 2
        assert not ledger.verify_chain()
        assert not oracles.independent_chain_check([b.to_dict() for b in ledger.blocks])

    def test_swapped_blocks_detected(self, toy):
        ledger, _, alice, _ = toy
        for i in range(3):
            ledger.submit(alice, "set_slot", {"key": f"k{i}", "value": i})
            ledger.seal_block()
        swapped = [ledger.blocks[0], ledger.blocks[2], ledger.blocks[1]]
        ok, bad = verify_blocks(swapped)
        assert not ok and bad == 1
        assert not oracles.independent_chain_check([b.to_dict() for b in swapped])

    def test_genesis_must_come_first(self):
        ledger = Ledger()
        ToyContract(ledger)
        alice = ledger.create_account("operator", 10)
        ledger.genesis()
        ledger.submit(alice, "peek", {"key": "x"})
        with pytest.raises(LedgerError):
            ledger.genesis()


def test_record_round_trips_through_dict(toy):
    ledger, _, alice, _ = toy
    rec = ledger.submit(alice, "set_slot", {"key": "a", "value": 1}, value=3)
    again = TransactionRecord.from_dict(rec.to_dict())
    assert again == rec
    block = ledger.seal_block()
    assert Block.from_dict(block.to_dict()) == block


def test_replay_determinism(toy):
    """The same submission sequence always produces the same chain."""
    rng = random.Random(55)
    script = []
    for _ in range(60):
        script.append(
            (
                rng.choice(["set_slot", "peek", "set_then_fail", "pay_out"]),
                {"key": rng.choice("abc"), "value": rng.randrange(5), "amount": rng.randrange(3)},
                rng.randrange(3),
            )
        )

    def run_script():
        ledger = Ledger()
        ToyContract(ledger)
        alice = ledger.create_account("operator", 1000)
        ledger.genesis(note="replay")
        for op, raw_args, value in script:
            args = {
                "set_slot": {"key": raw_args["key"], "value": raw_args["value"]},
                "peek": {"key": raw_args["key"]},
                "set_then_fail": {},
                "pay_out": {"amount": raw_args["amount"]},
            }[op]
            ledger.submit(alice, op, args, value=value if op == "set_slot" else 0)
        ledger.seal_block()
        return ledger

    one, two = run_script(), run_script()
    assert one.state_digest() == two.state_digest()
    assert [b.hash for b in one.blocks] == [b.hash for b in two.blocks]


def test_atomicity_over_random_interleavings(toy):
    ledger, contract, alice, bob = toy
    rng = random.Random(77)
    supply = ledger.total_supply()
    for _ in range(300):
        digest_before = ledger.state_digest()
        op = rng.choice(["set_then_fail", "bad_op", "overpay"])
        if op == "set_then_fail":
            rec = ledger.submit(alice, "set_then_fail", {})
        elif op == "bad_op":
            rec = ledger.submit(alice, "missing", {})
        else:
            rec = ledger.submit(bob, "set_slot", {"key": "x", "value": 0}, value=10**6)
        assert rec.status == "revert"
        assert ledger.state_digest() == digest_before
        assert ledger.total_supply() == supply
        # interleave a successful write so reverts happen against fresh state
        ledger.submit(alice, "set_slot", {"key": rng.choice("pq"), "value": rng.randrange(9)})


def test_canonical_json_is_sorted_and_compact():
    data = {"b": 1, "a": [1, {"z": 0, "y": None}]}
    assert canonical_json(data) == b'{"a":[1,{"y":null,"z":0}],"b":1}'
