"""Scenario-driven runs.

A scenario describes one complete arrangement: the treasury terms, the mint
window, the consensus parameters, who deposits what and when, how well the
operator performs over time, and any slashing events. :func:`run` wires a
fresh ledger, executes epochs 0..horizon, and returns a
:class:`RunReport`.

Every epoch executes the same fixed sub-step order:

1. beacon accrual (activations and exit maturation first),
   then any slashes scheduled for this epoch
2. beacon sweep
3. wallet reward forwarding, in validator index order
   (treasury distribution happens eagerly inside each receipt)
4. wallet watchdog checks
5. exit/withdrawal settlement
6. scheduled user actions: escrow post, mint-window abort, deposits,
   token transfers, claims, and the stake trigger once the raise fills

The watchdog runs after forwarding on purpose: the current epoch's rewards
count toward its window, so a healthy operator is never one epoch away
from a false trigger. Runs are fully schedule-driven; the seed is parsed
and carried for future jitter extensions but nothing consumes it, so two
runs of the same scenario produce byte-identical event logs and reports.

Scenario files are strict JSON: exactly the top-level keys {treasury,
mint, beacon, deposits, operator_schedule, slashes, horizon, seed};
unknown keys anywhere are rejected. Claim and token-transfer schedules
exist only on the in-code :class:`Scenario` for tests and demos, not in
the file format.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

from .beacon import BeaconContract, BeaconParams, ValidatorStatus, validator_by_id
from .errors import ContractError, InvalidScenario, InvariantViolation
from .ledger import Ledger, replay_balances
from .mint import MintConfig, MintContract
from .treasury import Phase, TreasuryConfig, TreasuryContract, balance_identity
from .wallet import ValidatorWallet, WalletConfig, WalletStatus

SYSTEM = "system"
OPERATOR = "operator"
MINT = "mint"
TREASURY = "treasury"
BEACON = "beacon"


def wallet_name(index: int) -> str:
    return f"wallet:{index}"


# --- scenario description ----------------------------------------------------

@dataclass(frozen=True)
class TreasurySpec:
    fee_bps: int
    expected_reward_per_epoch: int
    grace_epochs: int
    escrow_required: int
    validators: int


@dataclass(frozen=True)
class MintSpec:
    min_contribution: int
    open_epoch: int
    close_epoch: int


@dataclass(frozen=True)
class BeaconSpec:
    stake_requirement: int
    reward_per_epoch: int
    activation_delay: int
    exit_delay: int
    sweep_period: int


@dataclass(frozen=True)
class DepositAction:
    holder: str
    amount: int
    epoch: int


@dataclass(frozen=True)
class BehaviorWindow:
    """Performance factor over [from_epoch, to_epoch); to_epoch None = open-ended.

    validator None applies to every validator.
    """

    from_epoch: int
    factor: float
    to_epoch: int | None = None
    validator: int | None = None


@dataclass(frozen=True)
class SlashAction:
    epoch: int
    validator: int
    fraction_bps: int


@dataclass(frozen=True)
class ClaimAction:
    holder: str
    epoch: int


@dataclass(frozen=True)
class NftTransferAction:
    token_id: int
    from_holder: str
    to: str
    epoch: int


@dataclass(frozen=True)
class Scenario:
    treasury: TreasurySpec
    mint: MintSpec
    beacon: BeaconSpec
    deposits: tuple[DepositAction, ...]
    operator_schedule: tuple[BehaviorWindow, ...]
    slashes: tuple[SlashAction, ...]
    horizon: int
    seed: int
    claims: tuple[ClaimAction, ...] = ()
    nft_transfers: tuple[NftTransferAction, ...] = ()

    @property
    def target_total(self) -> int:
        return self.beacon.stake_requirement * self.treasury.validators


# --- strict JSON loading -------------------------------------------------------

_TOP_KEYS = ("treasury", "mint", "beacon", "deposits",
             "operator_schedule", "slashes", "horizon", "seed")


def _take(section: dict, where: str, keys: tuple[str, ...],
          optional: tuple[str, ...] = ()) -> dict:
    if not isinstance(section, dict):
        raise InvalidScenario(f"{where} must be an object")
    unknown = set(section) - set(keys) - set(optional)
    if unknown:
        raise InvalidScenario(f"unknown keys in {where}: {sorted(unknown)}")
    missing = set(keys) - set(section)
    if missing:
        raise InvalidScenario(f"missing keys in {where}: {sorted(missing)}")
    return section


def scenario_from_dict(doc: dict) -> Scenario:
    """Parse a scenario document, rejecting unknown keys outright."""
    _take(doc, "scenario", _TOP_KEYS)
    t = _take(doc["treasury"], "treasury",
              ("fee_bps", "expected_reward_per_epoch", "grace_epochs",
               "escrow_required", "validators"))
    m = _take(doc["mint"], "mint", ("min_contribution", "open_epoch", "close_epoch"))
    b = _take(doc["beacon"], "beacon",
              ("stake_requirement", "reward_per_epoch", "activation_delay",
               "exit_delay", "sweep_period"))
    if not isinstance(doc["deposits"], list):
        raise InvalidScenario("deposits must be a list")
    if not isinstance(doc["operator_schedule"], list):
        raise InvalidScenario("operator_schedule must be a list")
    if not isinstance(doc["slashes"], list):
        raise InvalidScenario("slashes must be a list")
    deposits = tuple(
        DepositAction(**_take(d, f"deposits[{i}]", ("holder", "amount", "epoch")))
        for i, d in enumerate(doc["deposits"]))
    schedule = tuple(
        BehaviorWindow(**_take(w, f"operator_schedule[{i}]", ("from_epoch", "factor"),
                               optional=("to_epoch", "validator")))
        for i, w in enumerate(doc["operator_schedule"]))
    slashes = tuple(
        SlashAction(**_take(s, f"slashes[{i}]", ("epoch", "validator", "fraction_bps")))
        for i, s in enumerate(doc["slashes"]))
    if not isinstance(doc["horizon"], int) or isinstance(doc["horizon"], bool):
        raise InvalidScenario("horizon must be an integer")
    if not isinstance(doc["seed"], int) or isinstance(doc["seed"], bool):
        raise InvalidScenario("seed must be an integer")
    return Scenario(
        treasury=TreasurySpec(**t),
        mint=MintSpec(**m),
        beacon=BeaconSpec(**b),
        deposits=deposits,
        operator_schedule=schedule,
        slashes=slashes,
        horizon=doc["horizon"],
        seed=doc["seed"],
    )


def load_scenario(path: str | Path) -> Scenario:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidScenario(f"cannot read scenario {path}: {exc}") from exc
    return scenario_from_dict(doc)


# --- semantic validation ----------------------------------------------------------

_RESERVED = {SYSTEM, OPERATOR, MINT, TREASURY, BEACON}


def _windows_for(schedule, j: int):
    return [w for w in schedule if w.validator in (None, j)]


def validate(s: Scenario) -> list[str]:
    """Return every constraint violation, not just the first."""
    out: list[str] = []
    t, mi, b = s.treasury, s.mint, s.beacon

    if s.horizon < 0:
        out.append(f"horizon must be >= 0, got {s.horizon}")
    if not (0 <= t.fee_bps <= 10_000):
        out.append(f"treasury.fee_bps {t.fee_bps} outside 0..10000")
    if t.grace_epochs < 1:
        out.append(f"treasury.grace_epochs must be >= 1, got {t.grace_epochs}")
    if t.expected_reward_per_epoch < 0:
        out.append("treasury.expected_reward_per_epoch must be >= 0")
    if t.escrow_required < 0:
        out.append("treasury.escrow_required must be >= 0")
    if t.validators < 1:
        out.append(f"treasury.validators must be >= 1, got {t.validators}")
    if mi.min_contribution < 1:
        out.append("mint.min_contribution must be >= 1")
    if not (0 <= mi.open_epoch < mi.close_epoch):
        out.append(f"mint window invalid: open {mi.open_epoch}, close {mi.close_epoch}")
    for name in ("stake_requirement", "reward_per_epoch", "activation_delay",
                 "exit_delay", "sweep_period"):
        if getattr(b, name) < 1:
            out.append(f"beacon.{name} must be >= 1")

    for i, d in enumerate(s.deposits):
        if not d.holder or not isinstance(d.holder, str):
            out.append(f"deposits[{i}]: holder must be a non-empty string")
        elif d.holder in _RESERVED or d.holder.startswith("wallet:"):
            out.append(f"deposits[{i}]: holder name {d.holder!r} is reserved")
        if d.amount < 1:
            out.append(f"deposits[{i}]: amount must be >= 1, got {d.amount}")
        if not (0 <= d.epoch <= s.horizon):
            out.append(f"deposits[{i}]: epoch {d.epoch} outside 0..{s.horizon}")

    for i, w in enumerate(s.operator_schedule):
        try:
            f = Fraction(str(w.factor))
            if not (0 <= f <= 1):
                out.append(f"operator_schedule[{i}]: factor {w.factor} outside [0, 1]")
        except (ValueError, ZeroDivisionError):
            out.append(f"operator_schedule[{i}]: factor {w.factor!r} is not a number")
        if w.from_epoch < 0:
            out.append(f"operator_schedule[{i}]: from_epoch must be >= 0")
        if w.from_epoch > s.horizon:
            out.append(f"operator_schedule[{i}]: from_epoch {w.from_epoch} beyond horizon {s.horizon}")
        if w.to_epoch is not None and w.to_epoch <= w.from_epoch:
            out.append(f"operator_schedule[{i}]: empty window [{w.from_epoch}, {w.to_epoch})")
        if w.validator is not None and not (0 <= w.validator < t.validators):
            out.append(f"operator_schedule[{i}]: validator {w.validator} outside 0..{t.validators - 1}")

    seen_overlaps = set()
    for j in range(t.validators):
        windows = sorted(_windows_for(s.operator_schedule, j),
                         key=lambda w: w.from_epoch)
        for a, b2 in zip(windows, windows[1:]):
            a_end = a.to_epoch if a.to_epoch is not None else s.horizon + 1
            if a_end > b2.from_epoch:
                key = (a.from_epoch, a.to_epoch, b2.from_epoch, b2.to_epoch)
                if key not in seen_overlaps:
                    seen_overlaps.add(key)
                    out.append(
                        f"operator_schedule windows overlap for validator {j}: "
                        f"[{a.from_epoch}, {a_end}) and [{b2.from_epoch}, "
                        f"{b2.to_epoch if b2.to_epoch is not None else s.horizon + 1})")

    for i, sl in enumerate(s.slashes):
        if not (0 <= sl.validator < t.validators):
            out.append(f"slashes[{i}]: validator index {sl.validator} outside 0..{t.validators - 1}")
        if not (0 < sl.fraction_bps <= 10_000):
            out.append(f"slashes[{i}]: fraction_bps {sl.fraction_bps} outside 1..10000")
        if not (0 <= sl.epoch <= s.horizon):
            out.append(f"slashes[{i}]: epoch {sl.epoch} outside 0..{s.horizon}")

    for i, c in enumerate(s.claims):
        if not (0 <= c.epoch <= s.horizon):
            out.append(f"claims[{i}]: epoch {c.epoch} outside 0..{s.horizon}")
    for i, tr in enumerate(s.nft_transfers):
        if not (0 <= tr.epoch <= s.horizon):
            out.append(f"nft_transfers[{i}]: epoch {tr.epoch} outside 0..{s.horizon}")
        if tr.to in _RESERVED:
            out.append(f"nft_transfers[{i}]: recipient {tr.to!r} is reserved")
    return out


# --- reporting ------------------------------------------------------------------

@dataclass
class HolderReport:
    holder: str
    capital: int
    claimed: int
    claimable: int
    settlement_credits: int
    realized_loss: int


@dataclass
class ValidatorReport:
    index: int
    validator_id: int | None
    rewards_received: int
    beacon_status: str | None
    exit_cause: str | None
    exit_epoch: int | None
    settled: bool
    returned: int | None
    shortfall: int | None
    escrow_cover: int | None
    penalty: int | None


@dataclass
class RunReport:
    horizon: int
    final_epoch: int
    phase: str
    holders: list[HolderReport]
    operator_fees_accrued: int
    operator_fees_claimed: int
    escrow_refunded: int
    validators: list[ValidatorReport]
    conservation_ok: bool
    replay_ok: bool
    minted: int
    burned: int
    final_total: int
    event_count: int
    events_digest: str
    events_jsonl: str

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "final_epoch": self.final_epoch,
            "phase": self.phase,
            "holders": [{
                "holder": h.holder,
                "capital": h.capital,
                "claimed": h.claimed,
                "claimable": h.claimable,
                "settlement_credits": h.settlement_credits,
                "realized_loss": h.realized_loss,
            } for h in self.holders],
            "operator": {
                "fees_accrued": self.operator_fees_accrued,
                "fees_claimed": self.operator_fees_claimed,
                "escrow_refunded": self.escrow_refunded,
            },
            "validators": [{
                "index": v.index,
                "validator_id": v.validator_id,
                "rewards_received": v.rewards_received,
                "beacon_status": v.beacon_status,
                "exit_cause": v.exit_cause,
                "exit_epoch": v.exit_epoch,
                "settled": v.settled,
                "returned": v.returned,
                "shortfall": v.shortfall,
                "escrow_cover": v.escrow_cover,
                "penalty": v.penalty,
            } for v in self.validators],
            "conservation": {
                "ok": self.conservation_ok,
                "replay_ok": self.replay_ok,
                "minted": self.minted,
                "burned": self.burned,
                "final_total": self.final_total,
            },
            "event_count": self.event_count,
            "events_digest": self.events_digest,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_csv(self) -> str:
        lines = ["holder_id,capital,claimed_total,final_credit,realized_loss"]
        for h in self.holders:
            lines.append(f"{h.holder},{h.capital},{h.claimed},{h.claimable},{h.realized_loss}")
        return "\n".join(lines) + "\n"


# --- the world ----------------------------------------------------------------------

class World:
    """One wired-up arrangement plus the driver that advances it."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.m = scenario.treasury.validators
        self.ledger = Ledger()
        led = self.ledger

        led.register_account(SYSTEM)
        led.register_account(OPERATOR)
        self.holders = self._holder_names(scenario)
        for h in self.holders:
            led.register_account(h)
        endow: dict[str, int] = {}
        for d in scenario.deposits:
            endow[d.holder] = endow.get(d.holder, 0) + d.amount
        for h in self.holders:
            if endow.get(h, 0) > 0:
                led.genesis(h, endow[h], "depositor endowment")
        if scenario.treasury.escrow_required > 0:
            led.genesis(OPERATOR, scenario.treasury.escrow_required, "operator escrow")

        b = scenario.beacon
        led.register_contract(BEACON, BeaconContract(BeaconParams(
            stake_requirement=b.stake_requirement,
            reward_per_epoch=b.reward_per_epoch,
            activation_delay=b.activation_delay,
            exit_delay=b.exit_delay,
            sweep_period=b.sweep_period,
        ), driver=SYSTEM), issuer=True)

        t = scenario.treasury
        wallets = tuple(wallet_name(j) for j in range(self.m))
        for w in wallets:
            led.register_contract(w, ValidatorWallet(WalletConfig(
                self_address=w,
                treasury=TREASURY,
                beacon=BEACON,
                operator=OPERATOR,
                stake_requirement=b.stake_requirement,
                expected_reward_per_epoch=t.expected_reward_per_epoch,
                grace_epochs=t.grace_epochs,
            )))
        led.register_contract(TREASURY, TreasuryContract(TreasuryConfig(
            fee_bps=t.fee_bps,
            expected_reward_per_epoch=t.expected_reward_per_epoch,
            grace_epochs=t.grace_epochs,
            operator=OPERATOR,
            escrow_required=t.escrow_required,
            stake_requirement=b.stake_requirement,
            mint=MINT,
        ), validators=wallets))
        led.register_contract(MINT, MintContract(MintConfig(
            treasury=TREASURY,
            min_contribution=scenario.mint.min_contribution,
            target_total=scenario.target_total,
            open_epoch=scenario.mint.open_epoch,
            close_epoch=scenario.mint.close_epoch,
        )))

        self._prev_total = led.total_balance()
        self._prev_minted = led.minted_total
        self._prev_burned = led.burned_total
        led.add_epoch_hook(self._epoch_substeps)

    @staticmethod
    def _holder_names(scenario: Scenario) -> list[str]:
        names = {d.holder for d in scenario.deposits}
        names.update(c.holder for c in scenario.claims)
        names.update(t.from_holder for t in scenario.nft_transfers)
        names.update(t.to for t in scenario.nft_transfers)
        return sorted(names)

    # --- driving ---------------------------------------------------------

    def run(self) -> RunReport:
        self._epoch_substeps()          # epoch 0
        for _ in range(self.scenario.horizon):
            self.ledger.advance_epoch()  # hook runs the sub-steps
        return self.report()

    def _epoch_substeps(self) -> None:
        led = self.ledger
        e = led.epoch
        s = self.scenario

        # (1) accrual, then scheduled slashes
        if led.contract_state(BEACON).validators:
            perf = {}
            for j in range(self.m):
                wst = led.contract_state(wallet_name(j))
                if wst.validator_id is not None:
                    perf[wst.validator_id] = self.factor_for(j, e)
            led.call(SYSTEM, BEACON, "accrue_epoch", {"performance": perf})
        for sl in s.slashes:
            if sl.epoch != e:
                continue
            wst = led.contract_state(wallet_name(sl.validator))
            if wst.validator_id is None:
                continue
            v = validator_by_id(led.contract_state(BEACON), wst.validator_id)
            if v.status is ValidatorStatus.ACTIVE:
                led.call(SYSTEM, BEACON, "slash",
                         {"validator_id": wst.validator_id,
                          "fraction_bps": sl.fraction_bps})

        # (2) sweep
        if led.contract_state(BEACON).validators:
            led.call(SYSTEM, BEACON, "sweep", {})

        # (3) reward forwarding; distribution is eager inside the treasury
        for j in range(self.m):
            w = wallet_name(j)
            wst = led.contract_state(w)
            if wst.status in (WalletStatus.ACTIVE, WalletStatus.EXIT_REQUESTED) \
                    and not wst.settlement_ready:
                led.call(SYSTEM, w, "forward_rewards", {})

        # (4) watchdogs
        for j in range(self.m):
            w = wallet_name(j)
            if led.contract_state(w).status is WalletStatus.ACTIVE:
                led.call(SYSTEM, w, "watchdog_check", {})

        # (5) settlements
        for j in range(self.m):
            w = wallet_name(j)
            wst = led.contract_state(w)
            if wst.status is WalletStatus.EXIT_REQUESTED and wst.settlement_ready:
                led.call(SYSTEM, w, "finalize_withdrawal", {})

        # (6) scheduled user actions
        if e == 0 and s.treasury.escrow_required > 0:
            led.call(OPERATOR, TREASURY, "post_escrow", {},
                     value=s.treasury.escrow_required)
        mst = led.contract_state(MINT)
        if (led.contract_state(TREASURY).phase is Phase.FUNDRAISING
                and not mst.aborted and e >= s.mint.close_epoch
                and mst.minted_total < s.target_total):
            led.call(SYSTEM, MINT, "abort", {})
        for d in s.deposits:
            if d.epoch == e:
                self._try(d.holder, MINT, "mint", {}, value=d.amount, action="mint")
        for tr in s.nft_transfers:
            if tr.epoch == e:
                self._try(tr.from_holder, MINT, "transfer_nft",
                          {"token_id": tr.token_id, "to": tr.to}, action="transfer_nft")
        for c in s.claims:
            if c.epoch == e:
                self._try(c.holder, TREASURY, "claim", {}, action="claim")
        mst = led.contract_state(MINT)
        tst = led.contract_state(TREASURY)
        if (tst.phase is Phase.FUNDRAISING and not mst.aborted
                and mst.minted_total == s.target_total
                and tst.escrow_balance >= s.treasury.escrow_required):
            led.call(SYSTEM, TREASURY, "stake_all", {})

        self.audit()

    def _try(self, caller: str, target: str, method: str, args: dict,
             value: int = 0, action: str = "") -> None:
        """Attempt a scheduled action; a rejection is recorded, not fatal."""
        try:
            self.ledger.call(caller, target, method, args, value=value)
        except ContractError as exc:
            self.ledger.emit(SYSTEM, "ActionRejected", {
                "action": action, "caller": caller, "reason": type(exc).__name__,
            })

    def factor_for(self, j: int, epoch: int):
        """Performance factor for validator index j at an epoch; default 1."""
        for w in self.scenario.operator_schedule:
            if w.validator in (None, j) and w.from_epoch <= epoch \
                    and (w.to_epoch is None or epoch < w.to_epoch):
                return w.factor
        return 1

    # --- live invariants -----------------------------------------------------

    def audit(self) -> None:
        """Conservation and accounting identities, checked every epoch."""
        led = self.ledger
        total = led.total_balance()
        if total != led.minted_total - led.burned_total:
            raise InvariantViolation(
                f"epoch {led.epoch}: total {total} != minted {led.minted_total} "
                f"- burned {led.burned_total}")
        delta = total - self._prev_total
        expect = (led.minted_total - self._prev_minted) - (led.burned_total - self._prev_burned)
        if delta != expect:
            raise InvariantViolation(
                f"epoch {led.epoch}: balance delta {delta} != minted-burned {expect}")
        self._prev_total, self._prev_minted, self._prev_burned = (
            total, led.minted_total, led.burned_total)

        tst = led.contract_state(TREASURY)
        if led.balance_of(TREASURY) != balance_identity(tst):
            raise InvariantViolation(
                f"epoch {led.epoch}: treasury balance {led.balance_of(TREASURY)} != "
                f"identity {balance_identity(tst)}")
        bst = led.contract_state(BEACON)
        vault = sum(v.balance for v in bst.validators)
        if led.balance_of(BEACON) != vault:
            raise InvariantViolation(
                f"epoch {led.epoch}: beacon vault {led.balance_of(BEACON)} != "
                f"validator balances {vault}")

    # --- report ------------------------------------------------------------------

    def report(self) -> RunReport:
        led = self.ledger
        tst = led.contract_state(TREASURY)
        events_jsonl = led.events_jsonl()

        names = set(self.holders)
        names.update(rec.owner for rec in tst.registry.values())
        names.update(tst.claimable)
        names.update(tst.claimed_total)
        capital: dict[str, int] = {}
        for rec in tst.registry.values():
            capital[rec.owner] = capital.get(rec.owner, 0) + rec.capital
        holders = []
        for h in sorted(names):
            cap = capital.get(h, 0)
            settled_credit = tst.settlement_credits.get(h, 0)
            loss = max(0, cap - settled_credit) if tst.phase is Phase.SETTLED else 0
            holders.append(HolderReport(
                holder=h,
                capital=cap,
                claimed=tst.claimed_total.get(h, 0),
                claimable=tst.claimable.get(h, 0),
                settlement_credits=settled_credit,
                realized_loss=loss,
            ))

        validators = []
        bst = led.contract_state(BEACON)
        for j in range(self.m):
            wst = led.contract_state(wallet_name(j))
            status = None
            if wst.validator_id is not None:
                status = validator_by_id(bst, wst.validator_id).status.value
            settlement = tst.settlements.get(j)
            validators.append(ValidatorReport(
                index=j,
                validator_id=wst.validator_id,
                rewards_received=tst.rewards_received.get(j, 0),
                beacon_status=status,
                exit_cause=tst.exit_causes.get(j),
                exit_epoch=wst.exit_epoch,
                settled=settlement is not None,
                returned=settlement.returned if settlement else None,
                shortfall=settlement.shortfall if settlement else None,
                escrow_cover=settlement.escrow_cover if settlement else None,
                penalty=settlement.penalty if settlement else None,
            ))

        replay = replay_balances(led.events)
        replay_ok = all(
            replay.delta_by_epoch.get(ep, 0)
            == replay.minted_by_epoch.get(ep, 0) - replay.burned_by_epoch.get(ep, 0)
            for ep in range(led.epoch + 1)
        ) and all(
            replay.balances.get(name, 0) == led.balance_of(name)
            for name in set(replay.balances) | set(self.holders)
            | {SYSTEM, OPERATOR, MINT, TREASURY, BEACON}
            | {wallet_name(j) for j in range(self.m)}
        )
        conservation_ok = led.total_balance() == led.minted_total - led.burned_total

        return RunReport(
            horizon=self.scenario.horizon,
            final_epoch=led.epoch,
            phase=tst.phase.value,
            holders=holders,
            operator_fees_accrued=tst.operator_fees_accrued,
            operator_fees_claimed=tst.fees_claimed_total,
            escrow_refunded=tst.escrow_refunded,
            validators=validators,
            conservation_ok=conservation_ok,
            replay_ok=replay_ok,
            minted=led.minted_total,
            burned=led.burned_total,
            final_total=led.total_balance(),
            event_count=len(led.events),
            events_digest=hashlib.sha256(events_jsonl.encode()).hexdigest(),
            events_jsonl=events_jsonl,
        )


def run(scenario: Scenario) -> RunReport:
    """Validate, wire, and execute one scenario."""
    violations = validate(scenario)
    if violations:
        raise InvalidScenario(violations[0])
    return World(scenario).run()


def with_overrides(scenario: Scenario, horizon: int | None = None,
                   seed: int | None = None) -> Scenario:
    """A copy with horizon and/or seed replaced (the CLI's --epochs/--seed)."""
    out = scenario
    if horizon is not None:
        out = replace(out, horizon=horizon)
    if seed is not None:
        out = replace(out, seed=seed)
    return out
