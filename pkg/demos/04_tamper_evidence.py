"""The audit trail resists editing.

Seals a few blocks, verifies the chain, then flips data in a recorded
transaction and shows verification pinpointing the damage.

Run: python3 demos/04_tamper_evidence.py
"""

import copy

from skyledger import AuthorityContract, Ledger
from skyledger.ledger import verify_blocks

ledger = Ledger()
authority = AuthorityContract(ledger)
operator = ledger.create_account("operator", 1000)
ledger.genesis(note="tamper demo")

for i in range(3):
    ledger.submit(operator, "register_drone",
                  {"serial": f"SN-{i}", "ownerNationalId": f"N-{i}", "signTAC": True})
    block = ledger.seal_block()
    print(f"sealed block {block.index}: hash {block.hash.hex()[:24]}…")

print(f"\nchain verifies: {ledger.verify_chain()}")

tampered = copy.deepcopy(ledger.blocks)
victim = tampered[1].transactions[0]
print(f"\nrewriting history: block 1, tx {victim.tx_id}: serial {victim.args['serial']!r} -> 'SN-FAKE'")
victim.args["serial"] = "SN-FAKE"

ok, bad_index = verify_blocks(tampered)
print(f"verification now: ok={ok}, first broken block: {bad_index}")

print("\nand fixing up block 1's hash does not help, the links are chained:")
from skyledger.ledger import block_digest

tampered[1].hash = block_digest(tampered[1].index, tampered[1].prev_hash, tampered[1].transactions)
ok, bad_index = verify_blocks(tampered)
print(f"verification now: ok={ok}, first broken block: {bad_index} (the successor's parent link)")
