"""Service-supplier contract: subscriptions, mission plans, crowd reports,
and mission settlement.

Money flow, all in whole currency units:

* subscription fees go to the supplier treasury;
* at plan time the refundable compliance deposit is moved from the
  treasury receipt into a dedicated escrow account, the rest of the fee
  stays in the treasury;
* each valid crowd report pays the reporter from the treasury, then
  either accrues a bonus into escrow (sighting matches the plan) or
  forfeits a fine from escrow back to the treasury (it does not);
* settlement pays the whole per-mission escrow balance to the owner:
  max(0, deposit - penalties * fine) + rewards * bonus.

The escrow account therefore always equals the sum over active plans of
the eventual payout, and drains to zero once every mission settles.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Any

from . import economics, geo
from .authority import AuthorityContract
from .economics import FeeParams
from .ledger import AccountId, ContractRevert, Ledger
from .rid import compute_rid_vc, decode_rid, MalformedRid, verify_rid_vc

REVERT_NOT_OWNER_SUBSCRIBE = "Not the owner of the registered drone"
REVERT_ALREADY_SUBSCRIBED = "Drone is already subscribed"
REVERT_SUBSCRIPTION_FEE = "Please make sure to pay the subscription fee"
REVERT_NOT_OWNER_QUOTE = "Not the owner of a registered drone"
REVERT_NOT_SUBSCRIBED_QUOTE = "Drone is not subscribed"
REVERT_NOT_SUBSCRIBED_PLAN = "Not subscribed to a USS"
REVERT_ACTIVE_PLAN_EXISTS = "There is already an active plan for this drone"
REVERT_PLAN_FEE = "Please make sure to pay the mission plan fee"
REVERT_OWNER_REPORT = "Owner of drone cannot report it!"
REVERT_DUPLICATE_REPORT = "not allowed to report same drone more than once"
REVERT_INVALID_REPORT = "Invalid report"
REVERT_NOT_OWNER_COMPLETE = "Not owner of drone"
REVERT_NO_ACTIVE_PLAN = "No active plan"
REASON_SCHEDULE_CONFLICT = "schedule-conflict"
REASON_INVALID_DMS = "invalid-dms"
REASON_INVALID_DATETIME = "invalid-datetime"
REASON_MALFORMED_RID = "malformed-rid"
REASON_INVALID_RIDVC = "invalid-ridvc"

VERDICT_REWARD = "reward"
VERDICT_PENALTY = "penalty"
VERDICT_INVALID = "invalid"

_DAYS_IN_MONTH = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)


def _is_leap(year: int) -> bool:
    return year % 4 == 0 and (year % 100 != 0 or year % 400 == 0)


def _days_from_civil(day: int, month: int, year: int) -> int:
    if not 1 <= month <= 12:
        raise ValueError("month out of range")
    limit = _DAYS_IN_MONTH[month - 1] + (1 if month == 2 and _is_leap(year) else 0)
    if not 1 <= day <= limit:
        raise ValueError("day out of range")
    days = (year - 1) * 365 + (year - 1) // 4 - (year - 1) // 100 + (year - 1) // 400
    days += sum(_DAYS_IN_MONTH[:month - 1])
    if month > 2 and _is_leap(year):
        days += 1
    return days + day - 1


def parse_departure_epoch(date_ddmmyyyy: str, time_hhmm: str, epoch_date_ddmmyyyy: str) -> int:
    """Seconds since the scenario epoch (midnight of the epoch date)."""
    for text, width in ((date_ddmmyyyy, 8), (time_hhmm, 4), (epoch_date_ddmmyyyy, 8)):
        if len(text) != width or not text.isdigit():
            raise ValueError(f"malformed date/time field {text!r}")
    hour, minute = int(time_hhmm[:2]), int(time_hhmm[2:])
    if hour > 23 or minute > 59:
        raise ValueError(f"time out of range {time_hhmm!r}")
    day = _days_from_civil(int(date_ddmmyyyy[:2]), int(date_ddmmyyyy[2:4]), int(date_ddmmyyyy[4:]))
    epoch_day = _days_from_civil(int(epoch_date_ddmmyyyy[:2]), int(epoch_date_ddmmyyyy[2:4]), int(epoch_date_ddmmyyyy[4:]))
    return (day - epoch_day) * 86400 + hour * 3600 + minute * 60


class NonceSource:
    """Counter-mode SHA-256 nonce stream; whole state is one integer."""

    def __init__(self, seed: bytes, counter: int = 0):
        self.seed = seed
        self.counter = counter

    def next(self) -> bytes:
        value = hashlib.sha256(self.seed + self.counter.to_bytes(8, "big")).digest()[:16]
        self.counter += 1
        return value


@dataclass(frozen=True)
class UssParams:
    """Contract configuration; every default can be overridden per scenario."""

    fee: FeeParams = field(default_factory=FeeParams)
    subscription_fee: int = 100
    reporter_reward: int = 20        # deposit / 50 with the default deposit
    fine_unit: int = 100             # deposit / 10
    bonus_unit: int = 100            # deposit / 10
    cruise_speed_mps: int = 10
    altitude_m: int = 60
    altitude_band_m: int = 30
    match_window_s: int = 120
    deconfliction_cell_buffer: int = 1
    deconfliction_time_buffer_s: int = 60
    subscription_period_s: int = 365 * 86400
    epoch_date: str = "01012025"
    grid: geo.GridConfig = field(default_factory=geo.GridConfig)


@dataclass
class Subscription:
    drone_id: int
    subscriber: AccountId
    paid_fee: int
    expiry: int


@dataclass
class MissionPlan:
    drone_id: int
    owner_account: AccountId
    source: str
    destination: str
    departure_date: str
    departure_time: str
    departure_epoch: int
    arrival_epoch: int
    src_arcsec: tuple[int, int]
    dst_arcsec: tuple[int, int]
    altitude_m: int
    alt_band: int
    route: list[geo.CellWindow]
    rid_vc: bytes
    active: bool = True

    def to_public_dict(self) -> dict[str, Any]:
        # nonce lives elsewhere and is never part of any export
        return {
            "droneId": self.drone_id,
            "source": self.source,
            "destination": self.destination,
            "departureDate": self.departure_date,
            "departureTime": self.departure_time,
            "departureEpoch": self.departure_epoch,
            "arrivalEpoch": self.arrival_epoch,
            "altitudeM": self.altitude_m,
            "route": [
                {"latIdx": w.lat_idx, "lonIdx": w.lon_idx, "altBand": w.alt_band,
                 "enterS": w.enter_s, "exitS": w.exit_s}
                for w in self.route
            ],
            "ridVc": self.rid_vc.hex(),
            "active": self.active,
        }

    def planned_cell_at(self, at_s: int, grid: geo.GridConfig) -> tuple[int, int]:
        elapsed = min(max(at_s - self.departure_epoch, 0), self.arrival_epoch - self.departure_epoch)
        pos = geo.interpolate_position(
            self.src_arcsec, self.dst_arcsec, elapsed, self.arrival_epoch - self.departure_epoch
        )
        return grid.cell_of(*pos)


@dataclass
class SightingRecord:
    reporter: AccountId
    drone_id: int
    rid_hex: str
    cell: tuple[int, int]
    sighting_time: int
    verdict: str


class UssContract:
    def __init__(self, ledger: Ledger, authority: AuthorityContract, params: UssParams, nonce_seed: bytes):
        self.ledger = ledger
        self.authority = authority
        self.params = params
        self.treasury = ledger.create_account("uss")
        self.escrow = ledger.create_account("uss")
        self.storage: dict[str, Any] = {
            "subscriptions": {},      # drone_id -> Subscription
            "plans": {},              # drone_id -> MissionPlan
            "nonces": {},             # drone_id -> bytes, USS-side secret
            "report_counts": {},      # drone_id -> {reporter: count}, reset per mission
            "sightings": [],          # SightingRecord, append-only audit trail
            "reputation": {},         # owner account -> ReputationState
            "escrow_by_drone": {},    # drone_id -> currency held for the mission
            "forfeited": {},          # drone_id -> fines taken so far, capped at deposit
            "nonce_counter": 0,
        }
        self._nonce_seed = nonce_seed
        ledger.attach_storage("uss", self.storage)
        ledger.register_op("subscribe", self.op_subscribe, payable=True, receiver=self.treasury)
        ledger.register_op("request_quote", self.op_request_quote, view=True)
        ledger.register_op("request_plan", self.op_request_plan, payable=True, receiver=self.treasury)
        ledger.register_op("report_drone", self.op_report_drone)
        ledger.register_op("report_completion", self.op_report_completion)

    # -- helpers -----------------------------------------------------------

    @property
    def plans(self) -> dict[int, MissionPlan]:
        return self.storage["plans"]

    def reputation_of(self, owner: AccountId) -> economics.ReputationState:
        state = self.storage["reputation"].get(owner)
        if state is None:
            return economics.ReputationState()
        return state

    def _subscription_valid(self, drone_id: int, caller: AccountId) -> bool:
        sub = self.storage["subscriptions"].get(drone_id)
        return sub is not None and sub.subscriber == caller and self.ledger.clock <= sub.expiry

    def congestion_count(self, at_s: int) -> int:
        """Active plans whose buffered time window contains the instant."""
        buf = self.params.deconfliction_time_buffer_s
        return sum(
            1
            for p in self.plans.values()
            if p.departure_epoch - buf <= at_s <= p.arrival_epoch + buf
        )

    def quote_fee(self, owner: AccountId, at_s: int) -> tuple[int, int]:
        fee_params = self.params.fee
        congestion = self.congestion_count(at_s)
        surcharge = economics.congestion_surcharge(congestion, fee_params.surcharge_per_mission)
        fee = economics.dynamic_fee(
            self.reputation_of(owner).k_micro, fee_params.base_cost, fee_params.deposit, surcharge
        )
        return fee, congestion

    # -- operations ---------------------------------------------------------

    def op_subscribe(self, caller: AccountId, args: dict[str, Any]) -> dict[str, Any]:
        drone_id = int(args["droneId"])
        value = int(args["_value"])
        record = self.authority.record(drone_id)
        if caller != record.owner_account:
            raise ContractRevert(REVERT_NOT_OWNER_SUBSCRIBE)
        if drone_id in self.storage["subscriptions"]:
            raise ContractRevert(REVERT_ALREADY_SUBSCRIBED)
        if value != self.params.subscription_fee:
            raise ContractRevert(REVERT_SUBSCRIPTION_FEE)
        expiry = self.ledger.clock + self.params.subscription_period_s
        self.storage["subscriptions"][drone_id] = Subscription(drone_id, caller, value, expiry)
        return {"droneId": drone_id, "expiry": expiry}

    def op_request_quote(self, caller: AccountId, args: dict[str, Any]) -> dict[str, Any]:
        drone_id = int(args["droneId"])
        record = self.authority.record(drone_id)
        if caller != record.owner_account:
            raise ContractRevert(REVERT_NOT_OWNER_QUOTE)
        if not self._subscription_valid(drone_id, caller):
            raise ContractRevert(REVERT_NOT_SUBSCRIBED_QUOTE)
        fee, congestion = self.quote_fee(caller, self.ledger.clock)
        return {"fee": fee, "congestion": congestion}

    def op_request_plan(self, caller: AccountId, args: dict[str, Any]) -> dict[str, Any]:
        drone_id = int(args["droneId"])
        value = int(args["_value"])
        if not self._subscription_valid(drone_id, caller):
            raise ContractRevert(REVERT_NOT_SUBSCRIBED_PLAN)
        record = self.authority.record(drone_id)
        if record.has_active_plan:
            raise ContractRevert(REVERT_ACTIVE_PLAN_EXISTS)

        source, destination = str(args["source"]), str(args["destination"])
        date, time = str(args["departureDate"]), str(args["departureTime"])
        try:
            src = geo.parse_dms_pair(source)
            dst = geo.parse_dms_pair(destination)
        except geo.DmsError:
            raise ContractRevert(REASON_INVALID_DMS) from None
        try:
            depart_s = parse_departure_epoch(date, time, self.params.epoch_date)
        except ValueError:
            raise ContractRevert(REASON_INVALID_DATETIME) from None

        fee, congestion = self.quote_fee(caller, depart_s)
        if value < fee:
            raise ContractRevert(REVERT_PLAN_FEE)

        route, arrival_s = self.schedule_route(src, dst, depart_s)

        nonce = NonceSource(self._nonce_seed, self.storage["nonce_counter"]).next()
        self.storage["nonce_counter"] += 1
        rid_vc = compute_rid_vc(nonce, caller, source, destination, date, time)

        plan = MissionPlan(
            drone_id=drone_id,
            owner_account=caller,
            source=source,
            destination=destination,
            departure_date=date,
            departure_time=time,
            departure_epoch=depart_s,
            arrival_epoch=arrival_s,
            src_arcsec=src,
            dst_arcsec=dst,
            altitude_m=self.params.altitude_m,
            alt_band=self.params.altitude_m // self.params.altitude_band_m,
            route=route,
            rid_vc=rid_vc,
        )
        self.plans[drone_id] = plan
        self.storage["nonces"][drone_id] = nonce
        self.storage["report_counts"][drone_id] = {}
        self.authority.set_active_plan(drone_id, True)

        deposit = self.params.fee.deposit
        self.ledger.transfer(self.treasury, self.escrow, deposit)
        self.storage["escrow_by_drone"][drone_id] = deposit
        self.storage["forfeited"][drone_id] = 0

        payload = plan.to_public_dict()
        payload.update({"fee": fee, "congestion": congestion})
        return payload

    def schedule_route(
        self, src: tuple[int, int], dst: tuple[int, int], depart_s: int
    ) -> tuple[list[geo.CellWindow], int]:
        """Straight-line cell route at the configured altitude.

        Reverts "schedule-conflict" when any cell-time window comes
        within the deconfliction buffer (1 cell, 60 s by default) of an
        active plan's occupancy.
        """
        grid = self.params.grid
        duration = geo.flight_duration_s(grid, src, dst, self.params.cruise_speed_mps)
        alt_band = self.params.altitude_m // self.params.altitude_band_m
        route = geo.route_occupancy(grid, src, dst, depart_s, duration, alt_band)
        occupied: dict[tuple[int, int], list[geo.CellWindow]] = {}
        for plan in self.plans.values():
            for window in plan.route:
                occupied.setdefault((window.lat_idx, window.lon_idx), []).append(window)
        buf_cells = self.params.deconfliction_cell_buffer
        buf_s = self.params.deconfliction_time_buffer_s
        for window in route:
            for dlat in range(-buf_cells, buf_cells + 1):
                for dlon in range(-buf_cells, buf_cells + 1):
                    for other in occupied.get((window.lat_idx + dlat, window.lon_idx + dlon), ()):
                        if geo.windows_conflict(window, other, buf_cells, buf_s):
                            raise ContractRevert(REASON_SCHEDULE_CONFLICT)
        return route, depart_s + duration

    def op_report_drone(self, caller: AccountId, args: dict[str, Any]) -> dict[str, Any]:
        drone_id = int(args["droneId"])
        record = self.authority.record(drone_id)
        if caller == record.owner_account:
            raise ContractRevert(REVERT_OWNER_REPORT)
        counts = self.storage["report_counts"].setdefault(drone_id, {})
        if counts.get(caller, 0) >= 1:
            raise ContractRevert(REVERT_DUPLICATE_REPORT)
        counts[caller] = counts.get(caller, 0) + 1

        try:
            message = decode_rid(bytes.fromhex(str(args["rid"])))
        except (MalformedRid, ValueError):
            raise ContractRevert(REASON_MALFORMED_RID) from None
        try:
            sighting_cell = self.params.grid.cell_of(*geo.parse_dms_pair(str(args["sightingLocation"])))
        except geo.DmsError:
            raise ContractRevert(REASON_INVALID_DMS) from None
        sighting_time = int(args["sightingTime"])

        plan = self.plans.get(drone_id)
        nonce = self.storage["nonces"].get(drone_id)
        if plan is None or nonce is None or not verify_rid_vc(
            message.rid_vc,
            nonce,
            plan.owner_account,
            plan.source,
            plan.destination,
            plan.departure_date,
            plan.departure_time,
        ):
            raise ContractRevert(REVERT_INVALID_REPORT)

        self.ledger.transfer(self.treasury, caller, self.params.reporter_reward)
        self.ledger.emit(
            "DroneSighted",
            droneId=drone_id,
            sightingLocation=str(args["sightingLocation"]),
            reporter=caller,
        )

        if self._sighting_matches_plan(plan, sighting_cell, sighting_time):
            verdict = VERDICT_REWARD
            self.authority.add_reward(drone_id)
            self.ledger.transfer(self.treasury, self.escrow, self.params.bonus_unit)
            self.storage["escrow_by_drone"][drone_id] += self.params.bonus_unit
        else:
            verdict = VERDICT_PENALTY
            self.authority.add_penalty(drone_id)
            remaining = self.params.fee.deposit - self.storage["forfeited"][drone_id]
            fine = min(self.params.fine_unit, remaining)
            self.storage["forfeited"][drone_id] += fine
            self.storage["escrow_by_drone"][drone_id] -= fine
            self.ledger.transfer(self.escrow, self.treasury, fine)

        self.storage["sightings"].append(
            SightingRecord(caller, drone_id, str(args["rid"]), sighting_cell, sighting_time, verdict)
        )
        return {"verdict": verdict, "reporterReward": self.params.reporter_reward}

    def _sighting_matches_plan(self, plan: MissionPlan, cell: tuple[int, int], at_s: int) -> bool:
        """Same cell as the plan within the temporal tolerance window."""
        window_s = self.params.match_window_s
        for w in plan.route:
            if (w.lat_idx, w.lon_idx) == cell and w.enter_s - window_s <= at_s <= w.exit_s + window_s:
                return True
        return False

    def op_report_completion(self, caller: AccountId, args: dict[str, Any]) -> dict[str, Any]:
        drone_id = int(args["droneId"])
        record = self.authority.record(drone_id)
        if caller != record.owner_account:
            raise ContractRevert(REVERT_NOT_OWNER_COMPLETE)
        if not record.has_active_plan:
            raise ContractRevert(REVERT_NO_ACTIVE_PLAN)
        plan = self.plans[drone_id]
        if bytes.fromhex(str(args["ridVc"])) != plan.rid_vc:
            raise ContractRevert(REASON_INVALID_RIDVC)

        rewards, penalties = record.rewards, record.penalties
        deposit = self.params.fee.deposit
        payout = max(0, deposit - penalties * self.params.fine_unit) + rewards * self.params.bonus_unit
        held = self.storage["escrow_by_drone"].pop(drone_id)
        assert held == payout, "escrow drifted from the settlement formula"
        self.ledger.transfer(self.escrow, caller, payout)

        rep_micro = economics.reputation(rewards, penalties)
        prev = self.reputation_of(caller)
        k_micro = economics.update_k(
            rep_micro, prev.k_micro, self.params.fee.alpha_micro, self.params.fee.k_min_micro
        )
        self.storage["reputation"][caller] = economics.ReputationState(rep_micro, k_micro)

        self.authority.reset_counters(drone_id)
        self.authority.set_active_plan(drone_id, False)
        del self.plans[drone_id]
        del self.storage["nonces"][drone_id]
        del self.storage["forfeited"][drone_id]
        self.storage["report_counts"].pop(drone_id, None)
        self.ledger.emit("missionComplete", ridVc=plan.rid_vc.hex(), droneId=drone_id)

        return {
            "droneId": drone_id,
            "payout": payout,
            "rewards": rewards,
            "penalties": penalties,
            "reputationMicro": rep_micro,
            "kMicro": k_micro,
        }

    def export_active_plans(self) -> list[dict[str, Any]]:
        return [self.plans[d].to_public_dict() for d in sorted(self.plans)]

    def export_reputation(self) -> dict[str, dict[str, int]]:
        return {
            owner: {"reputationMicro": st.reputation_micro, "kMicro": st.k_micro}
            for owner, st in sorted(self.storage["reputation"].items())
        }
