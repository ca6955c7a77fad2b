"""Registry and reward accounting for the staking arrangement.

The treasury owns the NFT registry, receives every unit a validator wallet
forwards, and splits it in integer arithmetic: the operator's cut is
``amount * fee_bps // 10000``, the rest is credited to token owners in
proportion to contributed capital using floor division. Sub-unit
remainders are carried per token (scaled by the capital total) into the
next split, so a token's cumulative credit is always exactly
``floor(cumulative_net * C_i / sum(C))``: per-holder rounding error never
reaches one unit per receipt, for any capital distribution. The undistributed
units are tracked as dust, preserving the exact per-receipt identity::

    fee + sum(credits) + (dust_after - dust_before) == amount

Exit settlements flow through the same splitter but take no operator fee:
the fee is defined over rewards only, so principal returns, escrow
shortfall coverage, and non-performance penalties are distributed whole.

Phase machine: Fundraising -> Staked -> Exiting -> Settled, never skipping
or reversing. An aborted raise refunds depositors and simply never leaves
Fundraising.

The master conservation check is :func:`balance_identity`: at rest, the
treasury's ledger balance always equals principal + reward_pool +
sum(claimable) + dust + escrow_balance + operator_fees_accrued.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from .errors import (
    AlreadySettled,
    EscrowMissing,
    InvalidAmount,
    NotOperator,
    NothingToClaim,
    Underfunded,
    UnknownToken,
    UnknownValidator,
    WrongCaller,
    WrongPhase,
    WrongStatus,
)
from .ledger import Call, CallContext, Emit, Msg, Transfer
from .mint import NftRecord

CAUSE_PERFORMANCE = "performance"
CAUSE_SLASHED = "slashed"


class Phase(Enum):
    FUNDRAISING = "Fundraising"
    STAKED = "Staked"
    EXITING = "Exiting"
    SETTLED = "Settled"


@dataclass(frozen=True)
class TreasuryConfig:
    """Arrangement terms, fixed before the mint opens and immutable after."""

    fee_bps: int                     # operator fee ratio in basis points
    expected_reward_per_epoch: int   # watchdog expectation, per validator
    grace_epochs: int                # watchdog window length
    operator: str
    escrow_required: int
    stake_requirement: int
    mint: str                        # the only address allowed to register tokens

    def __post_init__(self):
        if not (0 <= self.fee_bps <= 10_000):
            raise ValueError("fee_bps out of range 0..10000")
        if self.grace_epochs <= 0:
            raise ValueError("grace_epochs must be positive")
        if self.expected_reward_per_epoch < 0 or self.escrow_required < 0:
            raise ValueError("amounts must be non-negative")
        if self.stake_requirement <= 0:
            raise ValueError("stake_requirement must be positive")


@dataclass(frozen=True)
class RewardReceipt:
    """One increment of a validator's reward total, as seen by the treasury.

    Receipts are journaled as RewardReceived events; summing a validator's
    receipts gives its lifetime reward total.
    """

    validator_index: int
    epoch: int
    amount: int


def reward_receipts(events) -> list[RewardReceipt]:
    """Extract the receipt journal from an event log (Event objects or dicts)."""
    out = []
    for e in events:
        tag = e["tag"] if isinstance(e, dict) else e.tag
        if tag != "RewardReceived":
            continue
        p = e["payload"] if isinstance(e, dict) else e.payload
        out.append(RewardReceipt(validator_index=p["validator_index"],
                                 epoch=p["epoch"], amount=p["amount"]))
    return out


@dataclass(frozen=True)
class SettlementRecord:
    returned: int
    shortfall: int
    escrow_cover: int
    penalty: int


@dataclass
class TreasuryState:
    validators: tuple[str, ...] = ()
    registry: dict[int, NftRecord] = field(default_factory=dict)
    sum_capital: int = 0
    principal: int = 0
    principal_staked: int = 0
    reward_pool: int = 0
    operator_fees_accrued: int = 0
    fees_claimed_total: int = 0
    claimable: dict[str, int] = field(default_factory=dict)
    claimed_total: dict[str, int] = field(default_factory=dict)
    remainders: dict[int, int] = field(default_factory=dict)  # token -> net*C_i mod sum_capital
    dust: int = 0
    escrow_balance: int = 0
    escrow_refunded: int = 0
    phase: Phase = Phase.FUNDRAISING
    rewards_received: dict[int, int] = field(default_factory=dict)
    receipt_count: int = 0
    exit_causes: dict[int, str] = field(default_factory=dict)
    settlements: dict[int, SettlementRecord] = field(default_factory=dict)
    settlement_credits: dict[str, int] = field(default_factory=dict)

    def clone(self) -> "TreasuryState":
        return TreasuryState(
            validators=self.validators,
            registry=dict(self.registry),
            sum_capital=self.sum_capital,
            principal=self.principal,
            principal_staked=self.principal_staked,
            reward_pool=self.reward_pool,
            operator_fees_accrued=self.operator_fees_accrued,
            fees_claimed_total=self.fees_claimed_total,
            claimable=dict(self.claimable),
            claimed_total=dict(self.claimed_total),
            remainders=dict(self.remainders),
            dust=self.dust,
            escrow_balance=self.escrow_balance,
            escrow_refunded=self.escrow_refunded,
            phase=self.phase,
            rewards_received=dict(self.rewards_received),
            receipt_count=self.receipt_count,
            exit_causes=dict(self.exit_causes),
            settlements=dict(self.settlements),
            settlement_credits=dict(self.settlement_credits),
        )


def balance_identity(state: TreasuryState) -> int:
    """What the treasury's ledger balance must equal at rest."""
    return (state.principal + state.reward_pool + sum(state.claimable.values())
            + state.dust + state.escrow_balance + state.operator_fees_accrued)


def split_credits(net: int, registry: dict[int, NftRecord], sum_capital: int,
                  remainders: dict[int, int]) -> tuple[list[list], int]:
    """Floor-divide `net` across tokens pro-rata by capital.

    Mutates `remainders` (per-token carry, scaled by sum_capital) and
    returns ([[token_id, owner, credit], ...] in token order, undistributed)
    with sum(credits) + undistributed == net exactly. A fresh remainder map
    yields credit_i == floor(net * C_i / sum_capital), and carrying the map
    across calls keeps each token's cumulative credit at exactly
    floor(cumulative_net * C_i / sum_capital).
    """
    credits = []
    total = 0
    for token_id in sorted(registry):
        rec = registry[token_id]
        acc = remainders.get(token_id, 0) + net * rec.capital
        share = acc // sum_capital
        remainders[token_id] = acc - share * sum_capital
        credits.append([token_id, rec.owner, share])
        total += share
    return credits, net - total


class TreasuryContract:
    def __init__(self, config: TreasuryConfig, validators: tuple[str, ...]):
        if len(validators) == 0:
            raise ValueError("need at least one validator wallet")
        self.config = config
        self.validators = tuple(validators)

    def initial_state(self) -> TreasuryState:
        return TreasuryState(validators=self.validators)

    def handle(self, state: TreasuryState, msg: Msg, ctx: CallContext):
        method = getattr(self, "_op_" + msg.method, None)
        if method is None:
            raise InvalidAmount(f"treasury has no method {msg.method!r}")
        return method(state, msg, ctx)

    # --- registry (mint-only) ---------------------------------------------

    def _op_register_nft(self, state: TreasuryState, msg: Msg, ctx: CallContext):
        if msg.caller != self.config.mint:
            raise WrongCaller("only the mint registers tokens")
        if state.phase is not Phase.FUNDRAISING:
            raise WrongPhase(f"cannot register in phase {state.phase.value}")
        st = state.clone()
        rec = NftRecord(
            token_id=msg.args["token_id"],
            owner=msg.args["owner"],
            capital=msg.args["capital"],
            minted_at=msg.args["minted_at"],
        )
        st.registry[rec.token_id] = rec
        st.sum_capital += rec.capital
        st.principal += rec.capital
        return st, [], None

    def _op_update_owner(self, state: TreasuryState, msg: Msg, ctx: CallContext):
        if msg.caller != self.config.mint:
            raise WrongCaller("only the mint moves tokens")
        token_id = msg.args["token_id"]
        rec = state.registry.get(token_id)
        if rec is None:
            raise UnknownToken(f"no token {token_id}")
        st = state.clone()
        st.registry[token_id] = replace(rec, owner=msg.args["to"])
        return st, [], None

    def _op_abort_refund(self, state: TreasuryState, msg: Msg, ctx: CallContext):
        if msg.caller != self.config.mint:
            raise WrongCaller("only the mint aborts")
        if state.phase is not Phase.FUNDRAISING:
            raise WrongPhase(f"cannot abort in phase {state.phase.value}")
        st = state.clone()
        effects = []
        for token_id in sorted(st.registry):
            rec = st.registry[token_id]
            effects.append(Transfer(rec.owner, rec.capital))
        st.principal = 0
        return st, effects, None

    # --- escrow and staking -------------------------------------------------

    def _op_post_escrow(self, state: TreasuryState, msg: Msg, ctx: CallContext):
        if msg.caller != self.config.operator:
            raise NotOperator("only the operator posts escrow")
        if msg.value <= 0:
            raise InvalidAmount("escrow post must carry value")
        if state.phase not in (Phase.FUNDRAISING, Phase.STAKED):
            raise WrongPhase(f"cannot post escrow in phase {state.phase.value}")
        st = state.clone()
        st.escrow_balance += msg.value
        return st, [Emit("EscrowPosted", {"amount": msg.value,
                                          "total": st.escrow_balance})], None

    def _op_stake_all(self, state: TreasuryState, msg: Msg, ctx: CallContext):
        """Deploy the raised principal to every validator wallet.

        Permissionless: preconditions, not the caller, gate it.
        """
        cfg = self.config
        if state.phase is not Phase.FUNDRAISING:
            raise WrongPhase(f"cannot stake in phase {state.phase.value}")
        target = cfg.stake_requirement * len(self.validators)
        if state.principal != target:
            raise Underfunded(f"raised {state.principal} of {target}")
        if state.escrow_balance < cfg.escrow_required:
            raise EscrowMissing(
                f"escrow {state.escrow_balance} below required {cfg.escrow_required}")
        st = state.clone()
        st.principal_staked = st.principal
        st.principal = 0
        st.phase = Phase.STAKED
        effects = [
            Emit("PhaseChanged", {"from": Phase.FUNDRAISING.value,
                                  "to": Phase.STAKED.value}),
            Emit("Staked", {"validators": len(self.validators),
                            "stake_each": cfg.stake_requirement}),
        ]
        for wallet in self.validators:
            effects.append(Call(wallet, "deposit", {}, value=cfg.stake_requirement))
        return st, effects, None

    # --- reward flow ---------------------------------------------------------

    def _op_receive_rewards(self, state: TreasuryState, msg: Msg, ctx: CallContext):
        if msg.caller not in self.validators:
            raise UnknownValidator(f"{msg.caller} is not a registered validator wallet")
        if state.phase not in (Phase.STAKED, Phase.EXITING):
            raise WrongPhase(f"cannot receive rewards in phase {state.phase.value}")
        if msg.value <= 0:
            raise InvalidAmount("reward receipt must carry value")
        j = self.validators.index(msg.caller)
        st = state.clone()
        st.rewards_received[j] = st.rewards_received.get(j, 0) + msg.value
        st.receipt_count += 1
        effects = [Emit("RewardReceived", {"validator_index": j,
                                           "epoch": ctx.epoch,
                                           "amount": msg.value})]
        effects.extend(self._distribute(st, msg.value, take_fee=True))
        return st, effects, None

    def _distribute(self, st: TreasuryState, amount: int,
                    take_fee: bool, settlement: bool = False) -> list:
        """Split `amount` between operator and holders.

        Mutates the already-cloned state in place and returns the events to
        emit. Credits go to each token's current owner; sub-unit remainders
        stay with the token for the next distribution.
        """
        fee = (amount * self.config.fee_bps) // 10_000 if take_fee else 0
        net = amount - fee
        credits, undistributed = split_credits(net, st.registry, st.sum_capital,
                                               st.remainders)
        for _, owner, share in credits:
            if share:
                st.claimable[owner] = st.claimable.get(owner, 0) + share
                if settlement:
                    st.settlement_credits[owner] = (
                        st.settlement_credits.get(owner, 0) + share)
        st.operator_fees_accrued += fee
        st.dust += undistributed
        return [Emit("Distributed", {"amount": amount, "fee": fee,
                                     "credits": credits, "dust": st.dust})]

    def _op_claim(self, state: TreasuryState, msg: Msg, ctx: CallContext):
        """Pull-payment of everything credited to the caller."""
        amount = state.claimable.get(msg.caller, 0)
        if amount <= 0:
            raise NothingToClaim(f"{msg.caller} has nothing to claim")
        st = state.clone()
        st.claimable[msg.caller] = 0
        st.claimed_total[msg.caller] = st.claimed_total.get(msg.caller, 0) + amount
        effects = [
            Transfer(msg.caller, amount),
            Emit("Claimed", {"holder": msg.caller, "amount": amount}),
        ]
        return st, effects, amount

    def _op_claim_operator_fees(self, state: TreasuryState, msg: Msg, ctx: CallContext):
        if msg.caller != self.config.operator:
            raise NotOperator(f"{msg.caller} is not the operator")
        amount = state.operator_fees_accrued
        if amount <= 0:
            raise NothingToClaim("no fees accrued")
        st = state.clone()
        st.operator_fees_accrued = 0
        st.fees_claimed_total += amount
        effects = [
            Transfer(msg.caller, amount),
            Emit("OperatorFeesClaimed", {"amount": amount}),
        ]
        return st, effects, amount

    # --- exit path -------------------------------------------------------------

    def _op_on_exit_initiated(self, state: TreasuryState, msg: Msg, ctx: CallContext):
        if msg.caller not in self.validators:
            raise UnknownValidator(f"{msg.caller} is not a registered validator wallet")
        j = self.validators.index(msg.caller)
        if j in state.exit_causes:
            raise WrongStatus(f"validator {j} already exiting")
        if state.phase not in (Phase.STAKED, Phase.EXITING):
            raise WrongPhase(f"no exits in phase {state.phase.value}")
        st = state.clone()
        st.exit_causes[j] = msg.args["cause"]
        effects = []
        if st.phase is Phase.STAKED:
            st.phase = Phase.EXITING
            effects.append(Emit("PhaseChanged", {"from": Phase.STAKED.value,
                                                 "to": Phase.EXITING.value}))
        return st, effects, None

    def _op_settle_exit(self, state: TreasuryState, msg: Msg, ctx: CallContext):
        """Distribute an exited validator's returned funds to the holders.

        Shortfall against the stake requirement is absorbed by escrow first;
        a performance-triggered exit additionally pays out this validator's
        share of the remaining escrow as a penalty. No operator fee on any
        of it. When the last validator settles, leftover escrow returns to
        the operator and the phase becomes Settled.
        """
        if msg.caller not in self.validators:
            raise UnknownValidator(f"{msg.caller} is not a registered validator wallet")
        if state.phase is not Phase.EXITING:
            raise WrongPhase(f"cannot settle in phase {state.phase.value}")
        j = self.validators.index(msg.caller)
        if j in state.settlements:
            raise AlreadySettled(f"validator {j} already settled")
        cause = state.exit_causes.get(j)
        if cause is None:
            raise WrongStatus(f"validator {j} never initiated an exit")

        st = state.clone()
        returned = msg.value
        shortfall = max(0, self.config.stake_requirement - returned)
        escrow_cover = min(shortfall, st.escrow_balance)
        st.escrow_balance -= escrow_cover
        penalty = 0
        if cause == CAUSE_PERFORMANCE:
            unsettled = len(self.validators) - len(st.settlements)
            penalty = st.escrow_balance // unsettled
            st.escrow_balance -= penalty
        st.settlements[j] = SettlementRecord(returned, shortfall, escrow_cover, penalty)

        effects = [Emit("ExitSettled", {
            "validator_index": j, "cause": cause, "returned": returned,
            "shortfall": shortfall, "escrow_cover": escrow_cover,
            "penalty": penalty,
        })]
        effects.extend(self._distribute(st, returned + escrow_cover + penalty,
                                        take_fee=False, settlement=True))

        if len(st.settlements) == len(self.validators):
            st.phase = Phase.SETTLED
            effects.append(Emit("PhaseChanged", {"from": Phase.EXITING.value,
                                                 "to": Phase.SETTLED.value}))
            if st.escrow_balance > 0:
                refund = st.escrow_balance
                st.escrow_balance = 0
                st.escrow_refunded = refund
                effects.append(Transfer(self.config.operator, refund))
                effects.append(Emit("EscrowRefunded", {"amount": refund}))
        return st, effects, None
