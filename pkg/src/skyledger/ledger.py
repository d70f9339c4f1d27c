"""Single-node permissioned ledger with revert semantics and a hash chain.

Every state mutation goes through submit() as a caller-attributed
transaction. Operations either succeed or revert; a revert rolls back
all state and value changes and is still recorded in the log. Pending
transactions are batched into blocks whose SHA-256 hashes chain back to
an all-zero genesis parent, so any byte of recorded history can be
checked after the fact.

Caller authenticity is modeled by trusted attribution (the `signature`
field on each record is a hook, not a scheme). Timestamps come from the
simulation clock. There is no consensus and no mining: determinism is
the point, it is what makes the protocol logic testable against
independent oracles.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import pickle
import threading
from dataclasses import dataclass, field
from typing import Any, Callable

AccountId = str

ROLES = ("operator", "reporter", "uss", "authority")
GENESIS_PREV_HASH = b"\x00" * 32
GENESIS_CALLER = "0x" + "00" * 20

REASON_UNKNOWN_OPERATION = "unknown-operation"
REASON_INSUFFICIENT_BALANCE = "insufficient-balance"
REASON_NOT_PAYABLE = "not-payable"


class LedgerError(Exception):
    pass


class UnknownAccount(LedgerError):
    pass


class InsufficientBalance(LedgerError):
    pass


class ContractRevert(Exception):
    """Abort the current operation; submit() records the reason and rolls back."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def canonical_json(obj: Any) -> bytes:
    """The one serialization used for hashing: sorted keys, no spaces."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True).encode("utf-8")


def flatten_state(obj: Any, prefix: str = "") -> dict[str, Any]:
    """Flatten nested dicts/lists/dataclasses to leaf paths, for digests."""
    out: dict[str, Any] = {}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        obj = {f.name: getattr(obj, f.name) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        for k in obj:
            out.update(flatten_state(obj[k], f"{prefix}/{k}"))
        if not obj:
            out[prefix] = "{}"
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            out.update(flatten_state(v, f"{prefix}/{i}"))
        if not obj:
            out[prefix] = "[]"
    elif isinstance(obj, bytes):
        out[prefix] = obj.hex()
    else:
        out[prefix] = obj
    return out


def count_leaves(obj: Any) -> int:
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return sum(count_leaves(getattr(obj, f.name)) for f in dataclasses.fields(obj))
    if isinstance(obj, dict):
        return sum(count_leaves(v) for v in obj.values()) if obj else 1
    if isinstance(obj, (list, tuple)):
        return sum(count_leaves(v) for v in obj) if obj else 1
    return 1


def diff_count(before: Any, after: Any) -> int:
    """Number of leaf values that changed, appeared, or disappeared.

    Equal subtrees short-circuit through ==, so the walk only descends
    into parts of the state a transaction actually touched.
    """
    if type(before) is type(after):
        if before == after:
            return 0
        if dataclasses.is_dataclass(before) and not isinstance(before, type):
            return sum(
                diff_count(getattr(before, f.name), getattr(after, f.name))
                for f in dataclasses.fields(before)
            )
        if isinstance(before, dict):
            total = 0
            for key in before.keys() | after.keys():
                if key not in before:
                    total += count_leaves(after[key])
                elif key not in after:
                    total += count_leaves(before[key])
                else:
                    total += diff_count(before[key], after[key])
            return total
        if isinstance(before, (list, tuple)):
            total = sum(diff_count(a, b) for a, b in zip(before, after))
            longer, shorter = (before, after) if len(before) > len(after) else (after, before)
            total += sum(count_leaves(v) for v in longer[len(shorter):])
            return total
        return 1
    return count_leaves(before) + count_leaves(after)


@dataclass
class Account:
    id: AccountId
    role: str
    balance: int


@dataclass
class TransactionRecord:
    tx_id: int
    caller: AccountId
    op: str
    args: dict[str, Any]
    value: int
    timestamp: int
    status: str = "success"          # "success" | "revert"
    payload: Any = None
    reason: str | None = None
    state_writes: int = 0
    balance_deltas: dict[AccountId, int] = field(default_factory=dict)
    events: list[dict[str, Any]] = field(default_factory=list)
    signature: str | None = None     # authenticated-channel hook, unused

    def to_dict(self) -> dict[str, Any]:
        return {
            "txId": self.tx_id,
            "caller": self.caller,
            "op": self.op,
            "args": self.args,
            "value": self.value,
            "timestamp": self.timestamp,
            "status": self.status,
            "payload": self.payload,
            "reason": self.reason,
            "stateWrites": self.state_writes,
            "balanceDeltas": self.balance_deltas,
            "events": self.events,
            "signature": self.signature,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "TransactionRecord":
        return cls(
            tx_id=d["txId"],
            caller=d["caller"],
            op=d["op"],
            args=d["args"],
            value=d["value"],
            timestamp=d["timestamp"],
            status=d["status"],
            payload=d["payload"],
            reason=d["reason"],
            state_writes=d["stateWrites"],
            balance_deltas=d["balanceDeltas"],
            events=d["events"],
            signature=d["signature"],
        )


@dataclass
class Block:
    index: int
    prev_hash: bytes
    transactions: list[TransactionRecord]
    hash: bytes

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "prevHash": self.prev_hash.hex(),
            "hash": self.hash.hex(),
            "transactions": [t.to_dict() for t in self.transactions],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Block":
        return cls(
            index=d["index"],
            prev_hash=bytes.fromhex(d["prevHash"]),
            transactions=[TransactionRecord.from_dict(t) for t in d["transactions"]],
            hash=bytes.fromhex(d["hash"]),
        )


def block_digest(index: int, prev_hash: bytes, transactions: list[TransactionRecord]) -> bytes:
    body = canonical_json([t.to_dict() for t in transactions])
    return hashlib.sha256(index.to_bytes(8, "big") + prev_hash + body).digest()


def verify_blocks(blocks: list[Block]) -> tuple[bool, int | None]:
    """Recompute every digest and link; returns (ok, first bad index)."""
    prev = GENESIS_PREV_HASH
    for i, blk in enumerate(blocks):
        if blk.index != i or blk.prev_hash != prev:
            return False, i
        if block_digest(blk.index, blk.prev_hash, blk.transactions) != blk.hash:
            return False, i
        prev = blk.hash
    return True, None


@dataclass
class _OpSpec:
    fn: Callable[[AccountId, dict[str, Any]], Any]
    view: bool
    payable: bool
    receiver: AccountId | None


class Ledger:
    """Serialized transaction application over accounts and contract state.

    Single-writer: submissions are serialized behind one lock; reads of
    sealed blocks are safe from any thread.
    """

    def __init__(self, allow_empty_blocks: bool = False):
        self.clock: int = 0
        self.accounts: dict[AccountId, Account] = {}
        self.blocks: list[Block] = []
        self.pending: list[TransactionRecord] = []
        self.allow_empty_blocks = allow_empty_blocks
        self._storages: dict[str, dict[str, Any]] = {"accounts": self.accounts}
        self._ops: dict[str, _OpSpec] = {}
        self._account_counter = 0
        self._tx_counter = 0
        self._event_buffer: list[dict[str, Any]] = []
        self._lock = threading.Lock()

    # -- accounts ---------------------------------------------------------

    def create_account(self, role: str, balance: int = 0) -> AccountId:
        if role not in ROLES:
            raise ValueError(f"unknown role {role!r}")
        if balance < 0:
            raise ValueError("opening balance must be non-negative")
        digest = hashlib.sha256(f"account-{self._account_counter}".encode()).digest()
        self._account_counter += 1
        account_id = "0x" + digest[:20].hex()
        self.accounts[account_id] = Account(account_id, role, balance)
        return account_id

    def account(self, account_id: AccountId) -> Account:
        try:
            return self.accounts[account_id]
        except KeyError:
            raise UnknownAccount(account_id) from None

    def balance(self, account_id: AccountId) -> int:
        return self.account(account_id).balance

    def total_supply(self) -> int:
        return sum(a.balance for a in self.accounts.values())

    def transfer(self, src: AccountId, dst: AccountId, amount: int) -> None:
        if amount < 0:
            raise ValueError("amount must be non-negative")
        src_acc, dst_acc = self.account(src), self.account(dst)
        if src_acc.balance < amount:
            raise InsufficientBalance(f"{src} holds {src_acc.balance}, needs {amount}")
        src_acc.balance -= amount
        dst_acc.balance += amount

    # -- contract wiring --------------------------------------------------

    def attach_storage(self, name: str, storage: dict[str, Any]) -> None:
        if name in self._storages:
            raise ValueError(f"storage {name!r} already attached")
        self._storages[name] = storage

    def register_op(
        self,
        name: str,
        fn: Callable[[AccountId, dict[str, Any]], Any],
        *,
        view: bool = False,
        payable: bool = False,
        receiver: AccountId | None = None,
    ) -> None:
        if name in self._ops:
            raise ValueError(f"operation {name!r} already registered")
        if payable and receiver is None:
            raise ValueError("payable operations need a receiving account")
        self._ops[name] = _OpSpec(fn, view, payable, receiver)

    def emit(self, name: str, **args: Any) -> None:
        """Record an event against the transaction currently executing."""
        self._event_buffer.append({"name": name, "args": args})

    # -- transactions -----------------------------------------------------

    def genesis(self, note: str = "") -> TransactionRecord:
        """Record the opening balances as the first log entry.

        Makes metrics and conservation checks recomputable from the
        block log alone; this is the only entry not attributed to a
        real account.
        """
        if self._tx_counter != 0:
            raise LedgerError("genesis must be the first transaction")
        rec = TransactionRecord(
            tx_id=self._next_tx_id(),
            caller=GENESIS_CALLER,
            op="genesis",
            args={
                "note": note,
                "accounts": [
                    {"id": a.id, "role": a.role, "balance": a.balance}
                    for a in sorted(self.accounts.values(), key=lambda a: a.id)
                ],
            },
            value=0,
            timestamp=self.clock,
            payload={"totalSupply": self.total_supply()},
        )
        self.pending.append(rec)
        return rec

    def submit(self, caller: AccountId, op: str, args: dict[str, Any] | None = None, value: int = 0) -> TransactionRecord:
        args = dict(args or {})
        with self._lock:
            self.account(caller)  # unknown callers are a harness bug, not a revert
            if value < 0:
                raise ValueError("value must be non-negative")
            rec = TransactionRecord(
                tx_id=self._next_tx_id(),
                caller=caller,
                op=op,
                args=args,
                value=value,
                timestamp=self.clock,
            )
            # pickle round-trip is the rollback snapshot; it is only
            # unpickled on revert or for the post-success write count
            snapshot = pickle.dumps(self._storages, protocol=pickle.HIGHEST_PROTOCOL)
            balances_before = {a.id: a.balance for a in self.accounts.values()}
            self._event_buffer = []
            try:
                spec = self._ops.get(op)
                if spec is None:
                    raise ContractRevert(REASON_UNKNOWN_OPERATION)
                if value > 0:
                    if not spec.payable:
                        raise ContractRevert(REASON_NOT_PAYABLE)
                    if self.account(caller).balance < value:
                        raise ContractRevert(REASON_INSUFFICIENT_BALANCE)
                    self.transfer(caller, spec.receiver, value)
                # ops see the attached value without it entering the logged args
                rec.payload = spec.fn(caller, {**args, "_value": value})
            except ContractRevert as exc:
                self._rollback(snapshot)
                rec.status, rec.reason, rec.payload = "revert", exc.reason, None
            except InsufficientBalance:
                self._rollback(snapshot)
                rec.status, rec.reason, rec.payload = "revert", REASON_INSUFFICIENT_BALANCE, None
            else:
                rec.state_writes = diff_count(pickle.loads(snapshot), self._storages)
                rec.balance_deltas = self._balance_deltas(balances_before, self.accounts)
                rec.events = self._event_buffer
            self._event_buffer = []
            self.pending.append(rec)
            return rec

    def _next_tx_id(self) -> int:
        tx_id = self._tx_counter
        self._tx_counter += 1
        return tx_id

    def _rollback(self, snapshot: bytes) -> None:
        # contracts hold references to their root storage dicts, so the
        # roots are restored in place
        before = pickle.loads(snapshot)
        for name, storage in self._storages.items():
            storage.clear()
            storage.update(before[name])

    @staticmethod
    def _balance_deltas(before: dict[AccountId, int], after: dict[AccountId, Account]) -> dict[AccountId, int]:
        deltas = {}
        for account_id in sorted(after):
            delta = after[account_id].balance - before.get(account_id, 0)
            if delta:
                deltas[account_id] = delta
        return deltas

    # -- blocks -----------------------------------------------------------

    def seal_block(self) -> Block:
        if not self.pending and not self.allow_empty_blocks:
            raise LedgerError("no pending transactions to seal")
        index = len(self.blocks)
        prev = self.blocks[-1].hash if self.blocks else GENESIS_PREV_HASH
        block = Block(index, prev, self.pending, block_digest(index, prev, self.pending))
        self.blocks.append(block)
        self.pending = []
        return block

    def verify_chain(self) -> bool:
        ok, _ = verify_blocks(self.blocks)
        return ok

    def chain_head_hex(self) -> str:
        return self.blocks[-1].hash.hex() if self.blocks else GENESIS_PREV_HASH.hex()

    def state_digest(self) -> str:
        """Hash of all contract state (log excluded); replay comparator."""
        flat = flatten_state(self._storages)
        return hashlib.sha256(canonical_json(flat)).hexdigest()
