"""Minimal proof-of-stake consensus layer.

Just enough protocol to exercise the staking arrangement end to end:
validator lifecycle with activation and exit queues, per-epoch reward
issuance scaled by an operator performance factor, periodic sweeps of
rewards and exit balances to each validator's withdrawal address, and
slashing.

The beacon is registered on the ledger as an issuer contract: its own
account is the deposit vault, reward accrual is the only place units are
created, and slashing is the only place they are destroyed. The invariant
``sum of validator balances == vault balance`` ties the consensus view to
the ledger.

Withdrawal addresses are write-once: validator records are frozen
dataclasses and no operation constructs a record with a different
withdrawal address. Contract withdrawal addresses receive lifecycle
callbacks (``deposit_accepted``, ``on_validator_activated``,
``on_forced_exit``, ``on_exit_swept``) so a wallet can track its validator
without polling.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction

from .errors import InvalidAmount, InvalidFactor, NotActive, Unauthorized, UnknownValidator, WrongAmount, WrongStatus
from .ledger import AddressKind, Call, CallContext, Destroy, Emit, Issue, Msg, Transfer


class ValidatorStatus(Enum):
    PENDING = "PendingActivation"
    ACTIVE = "Active"
    EXITING = "Exiting"
    WITHDRAWABLE = "Withdrawable"
    WITHDRAWN = "Withdrawn"


@dataclass(frozen=True)
class BeaconParams:
    """Protocol constants; all strictly positive."""

    stake_requirement: int
    reward_per_epoch: int
    activation_delay: int
    exit_delay: int
    sweep_period: int

    def __post_init__(self):
        for name in ("stake_requirement", "reward_per_epoch", "activation_delay",
                     "exit_delay", "sweep_period"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class BeaconValidator:
    """One validator record. The withdrawal address is set once, at deposit."""

    id: int
    withdrawal_address: str
    operator: str
    balance: int
    status: ValidatorStatus
    activation_epoch: int
    exit_epoch: int | None = None


@dataclass
class BeaconState:
    validators: list[BeaconValidator] = field(default_factory=list)
    next_id: int = 0

    def clone(self) -> "BeaconState":
        return BeaconState(list(self.validators), self.next_id)


def exact_floor(amount: int, factor) -> int:
    """floor(amount * factor) with the factor read as a decimal literal.

    Going through str() pins 0.3 to 3/10 rather than its binary float
    neighbour, so accrual is platform-independent and matches what a
    scenario author wrote.
    """
    frac = Fraction(str(factor))
    return (amount * frac.numerator) // frac.denominator


class BeaconContract:
    """Message handler for the consensus layer.

    Per-epoch operations (accrue_epoch, sweep, slash) are restricted to the
    driver address; deposits are permissionless; exits require the
    withdrawal address or the validator's signing-capability holder.
    """

    def __init__(self, params: BeaconParams, driver: str):
        self.params = params
        self.driver = driver

    def initial_state(self) -> BeaconState:
        return BeaconState()

    def handle(self, state: BeaconState, msg: Msg, ctx: CallContext):
        method = getattr(self, "_op_" + msg.method, None)
        if method is None:
            raise InvalidAmount(f"beacon has no method {msg.method!r}")
        return method(state, msg, ctx)

    # --- operations -----------------------------------------------------

    def _op_submit_deposit(self, state: BeaconState, msg: Msg, ctx: CallContext):
        if msg.value != self.params.stake_requirement:
            raise WrongAmount(
                f"stake must be exactly {self.params.stake_requirement}, got {msg.value}")
        wa = msg.args["withdrawal_address"]
        operator = msg.args["operator"]
        ctx.kind_of(wa)  # raises UnknownAddress for unregistered targets
        st = state.clone()
        vid = st.next_id
        st.next_id += 1
        st.validators.append(BeaconValidator(
            id=vid,
            withdrawal_address=wa,
            operator=operator,
            balance=msg.value,
            status=ValidatorStatus.PENDING,
            activation_epoch=ctx.epoch + self.params.activation_delay,
        ))
        effects = [Emit("DepositAccepted", {
            "id": vid, "withdrawal_address": wa, "from": msg.caller,
            "activation_epoch": ctx.epoch + self.params.activation_delay,
        })]
        if ctx.kind_of(wa) is AddressKind.CONTRACT:
            effects.append(Call(wa, "deposit_accepted", {"validator_id": vid}))
        return st, effects, vid

    def _op_accrue_epoch(self, state: BeaconState, msg: Msg, ctx: CallContext):
        """Activate due validators, open due exits, then mint epoch rewards.

        args: performance maps validator id to a factor in [0, 1];
        missing ids default to 1.0. Returns the total minted.
        """
        self._require_driver(msg)
        performance = msg.args.get("performance", {})
        st = state.clone()
        effects = []
        now = ctx.epoch

        for i, v in enumerate(st.validators):
            if v.status is ValidatorStatus.PENDING and v.activation_epoch <= now:
                st.validators[i] = replace(v, status=ValidatorStatus.ACTIVE)
                effects.append(Emit("Activated", {"id": v.id}))
                if ctx.kind_of(v.withdrawal_address) is AddressKind.CONTRACT:
                    effects.append(Call(v.withdrawal_address, "on_validator_activated",
                                        {"validator_id": v.id}))
            elif v.status is ValidatorStatus.EXITING and v.exit_epoch is not None \
                    and v.exit_epoch <= now:
                st.validators[i] = replace(v, status=ValidatorStatus.WITHDRAWABLE)

        minted = 0
        amounts = []
        for i, v in enumerate(st.validators):
            if v.status is not ValidatorStatus.ACTIVE:
                continue
            factor = performance.get(v.id, 1)
            if not (0 <= Fraction(str(factor)) <= 1):
                raise InvalidFactor(f"performance factor {factor} outside [0, 1]")
            reward = exact_floor(self.params.reward_per_epoch, factor)
            if reward:
                st.validators[i] = replace(v, balance=v.balance + reward)
                minted += reward
            amounts.append([v.id, reward])
        if minted:
            effects.append(Issue(minted, "epoch rewards"))
        if amounts:
            effects.append(Emit("EpochAccrual", {"minted": minted, "amounts": amounts}))
        return st, effects, minted

    def _op_slash(self, state: BeaconState, msg: Msg, ctx: CallContext):
        self._require_driver(msg)
        vid = msg.args["validator_id"]
        bps = msg.args["fraction_bps"]
        if not (0 < bps <= 10_000):
            raise InvalidAmount(f"slash fraction {bps} bps outside (0, 10000]")
        st = state.clone()
        i = self._index_of(st, vid)
        v = st.validators[i]
        if v.status is not ValidatorStatus.ACTIVE:
            raise NotActive(f"validator {vid} is {v.status.value}")
        burned = (v.balance * bps) // 10_000
        st.validators[i] = replace(
            v,
            balance=v.balance - burned,
            status=ValidatorStatus.EXITING,
            exit_epoch=ctx.epoch + self.params.exit_delay,
        )
        effects = []
        if burned:
            effects.append(Destroy(burned, f"slash validator {vid}"))
        effects.append(Emit("Slashed", {
            "id": vid, "burned": burned, "fraction_bps": bps,
            "exit_epoch": ctx.epoch + self.params.exit_delay,
        }))
        if ctx.kind_of(v.withdrawal_address) is AddressKind.CONTRACT:
            effects.append(Call(v.withdrawal_address, "on_forced_exit",
                                {"validator_id": vid, "burned": burned}))
        return st, effects, burned

    def _op_request_exit(self, state: BeaconState, msg: Msg, ctx: CallContext):
        vid = msg.args["validator_id"]
        st = state.clone()
        i = self._index_of(st, vid)
        v = st.validators[i]
        if msg.caller not in (v.withdrawal_address, v.operator):
            raise Unauthorized(
                f"{msg.caller} may not exit validator {vid}")
        if v.status is not ValidatorStatus.ACTIVE:
            raise WrongStatus(f"validator {vid} is {v.status.value}")
        exit_epoch = ctx.epoch + self.params.exit_delay
        st.validators[i] = replace(v, status=ValidatorStatus.EXITING, exit_epoch=exit_epoch)
        effects = [Emit("ExitRequested", {"id": vid, "by": msg.caller,
                                          "exit_epoch": exit_epoch})]
        return st, effects, exit_epoch

    def _op_sweep(self, state: BeaconState, msg: Msg, ctx: CallContext):
        """Pay out due balances; a no-op off the sweep period grid.

        Active validators shed only their excess over the stake
        requirement; withdrawable ones are paid out in full and become
        Withdrawn.
        """
        self._require_driver(msg)
        if ctx.epoch % self.params.sweep_period != 0:
            return state, [], 0
        st = state.clone()
        effects = []
        total = 0
        for i, v in enumerate(st.validators):
            if v.status is ValidatorStatus.ACTIVE:
                excess = v.balance - self.params.stake_requirement
                if excess > 0:
                    st.validators[i] = replace(v, balance=self.params.stake_requirement)
                    effects.append(Transfer(v.withdrawal_address, excess))
                    effects.append(Emit("Swept", {"id": v.id, "to": v.withdrawal_address,
                                                  "amount": excess, "kind": "rewards"}))
                    total += excess
            elif v.status is ValidatorStatus.WITHDRAWABLE:
                amount = v.balance
                st.validators[i] = replace(v, balance=0, status=ValidatorStatus.WITHDRAWN)
                if amount > 0:
                    effects.append(Transfer(v.withdrawal_address, amount))
                effects.append(Emit("Swept", {"id": v.id, "to": v.withdrawal_address,
                                              "amount": amount, "kind": "exit"}))
                effects.append(Emit("Withdrawn", {"id": v.id}))
                if ctx.kind_of(v.withdrawal_address) is AddressKind.CONTRACT:
                    effects.append(Call(v.withdrawal_address, "on_exit_swept",
                                        {"validator_id": v.id, "amount": amount}))
                total += amount
        return st, effects, total

    # --- helpers ----------------------------------------------------------

    def _require_driver(self, msg: Msg) -> None:
        if msg.caller != self.driver:
            raise Unauthorized(f"{msg.caller} is not the protocol driver")

    @staticmethod
    def _index_of(state: BeaconState, vid: int) -> int:
        for i, v in enumerate(state.validators):
            if v.id == vid:
                return i
        raise UnknownValidator(f"no validator with id {vid}")


def validator_by_id(state: BeaconState, vid: int) -> BeaconValidator:
    for v in state.validators:
        if v.id == vid:
            return v
    raise UnknownValidator(f"no validator with id {vid}")
