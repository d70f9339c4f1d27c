"""Independent reference implementations the tests check against.

Everything here recomputes results by a different route than the
package: exact rationals for the fixed-point economics, second-by-second
enumeration for route occupancy, and a from-scratch digest chain walk.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction

MICRO = 10**6


def round_half_up(value: Fraction) -> int:
    return (value + Fraction(1, 2)).__floor__()


def rational_fee(k_micro: int, base_cost: int, deposit: int, surcharge: int) -> int:
    exact = Fraction(k_micro, MICRO) * base_cost + deposit + surcharge
    return round_half_up(exact)


def rational_reputation(rewards: int, penalties: int) -> int:
    exact = Fraction(rewards - penalties, rewards + penalties + 2)
    return round_half_up(exact * MICRO)


def rational_update_k(rep_micro: int, k_prev_micro: int, alpha_micro: int, k_min_micro: int) -> int:
    rep = Fraction(rep_micro, MICRO)
    alpha = Fraction(alpha_micro, MICRO)
    k_prev = Fraction(k_prev_micro, MICRO)
    exact = (1 - (rep + 1) / 2) * alpha + k_prev * (1 - alpha)
    return max(k_min_micro, round_half_up(exact * MICRO))


def independent_block_digest(block_dict: dict) -> str:
    """Recompute a block hash from its JSON form, separate codepath."""
    body = json.dumps(
        block_dict["transactions"], sort_keys=True, separators=(",", ":"), ensure_ascii=True
    ).encode()
    payload = block_dict["index"].to_bytes(8, "big") + bytes.fromhex(block_dict["prevHash"]) + body
    return hashlib.sha256(payload).hexdigest()


def independent_chain_check(block_dicts: list[dict]) -> bool:
    prev = "00" * 32
    for i, blk in enumerate(block_dicts):
        if blk["index"] != i or blk["prevHash"] != prev:
            return False
        if independent_block_digest(blk) != blk["hash"]:
            return False
        prev = blk["hash"]
    return True


def interpolated_cell(
    src: tuple[int, int],
    dst: tuple[int, int],
    depart_s: int,
    arrive_s: int,
    at_s: int,
    cell_size_m: int,
    meters_per_arcsec: int,
) -> tuple[int, int]:
    """Plan position at a time, via Fractions, floored to a cell."""
    duration = arrive_s - depart_s
    u = min(max(at_s - depart_s, 0), duration)
    out = []
    for a, b in zip(src, dst):
        pos = Fraction(a) if duration == 0 else Fraction(a) + Fraction(b - a) * Fraction(u, duration)
        arcsec = round_half_up(pos)
        out.append((arcsec * meters_per_arcsec) // cell_size_m)
    return out[0], out[1]


def expand_route(route: list[dict]) -> dict[int, tuple[int, int, int]]:
    """Window list to a per-second map of (latIdx, lonIdx, altBand)."""
    cells = {}
    for w in route:
        for t in range(w["enterS"], w["exitS"] + 1):
            cells[t] = (w["latIdx"], w["lonIdx"], w["altBand"])
    return cells


def brute_force_conflict(
    route_a: list[dict], route_b: list[dict], cell_buffer: int, time_buffer_s: int
) -> bool:
    """Quadratic cell-time overlap check over per-second expansions."""
    a, b = expand_route(route_a), expand_route(route_b)
    for ta, (lat_a, lon_a, band_a) in a.items():
        for tb, (lat_b, lon_b, band_b) in b.items():
            if band_a != band_b or abs(ta - tb) > time_buffer_s:
                continue
            if abs(lat_a - lat_b) <= cell_buffer and abs(lon_a - lon_b) <= cell_buffer:
                return True
    return False
