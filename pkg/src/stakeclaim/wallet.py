"""Validator smart-contract wallet.

Custodies one validator's stake, forwards every reward that lands in its
account to the treasury, and watches its own reward stream: if the trailing
window of received rewards falls below the configured expectation, it exits
the validator on its own. Nothing on that path needs, or accepts, a
message from the operator. The operator holds a signing capability on the
beacon side (recorded at deposit) and that is the full extent of their
authority.

``forward_rewards``, ``watchdog_check`` and ``finalize_withdrawal`` are
deliberately permissionless: any keeper may poke them, and the outcome is a
pure function of wallet state, so the poker gains nothing. Status moves
Idle -> Deposited -> Active -> ExitRequested -> Withdrawn, never backward,
and a wallet triggers at most one exit in its lifetime.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import BeaconNotSwept, InvalidAmount, WrongAmount, WrongCaller, WrongStatus
from .ledger import Call, CallContext, Emit, Msg
from .treasury import CAUSE_PERFORMANCE, CAUSE_SLASHED


class WalletStatus(Enum):
    IDLE = "Idle"
    DEPOSITED = "Deposited"
    ACTIVE = "Active"
    EXIT_REQUESTED = "ExitRequested"
    WITHDRAWN = "Withdrawn"


@dataclass(frozen=True)
class WalletConfig:
    self_address: str   # the name this wallet is registered under
    treasury: str
    beacon: str
    operator: str
    stake_requirement: int
    expected_reward_per_epoch: int
    grace_epochs: int


@dataclass
class WalletState:
    status: WalletStatus = WalletStatus.IDLE
    validator_id: int | None = None
    activation_epoch: int | None = None
    reward_window: dict[int, int] = field(default_factory=dict)
    last_check_epoch: int = -1
    forwarded_total: int = 0
    exit_cause: str | None = None
    exit_epoch: int | None = None
    settlement_ready: bool = False
    settlement_amount: int = 0

    def clone(self) -> "WalletState":
        return WalletState(
            status=self.status,
            validator_id=self.validator_id,
            activation_epoch=self.activation_epoch,
            reward_window=dict(self.reward_window),
            last_check_epoch=self.last_check_epoch,
            forwarded_total=self.forwarded_total,
            exit_cause=self.exit_cause,
            exit_epoch=self.exit_epoch,
            settlement_ready=self.settlement_ready,
            settlement_amount=self.settlement_amount,
        )


class ValidatorWallet:
    def __init__(self, config: WalletConfig):
        self.config = config

    def initial_state(self) -> WalletState:
        return WalletState()

    def handle(self, state: WalletState, msg: Msg, ctx: CallContext):
        method = getattr(self, "_op_" + msg.method, None)
        if method is None:
            raise InvalidAmount(f"wallet has no method {msg.method!r}")
        return method(state, msg, ctx)

    # --- staking ------------------------------------------------------------

    def _op_deposit(self, state: WalletState, msg: Msg, ctx: CallContext):
        """Treasury-only: submit the attached stake to the beacon.

        The beacon deposit pins this wallet as the validator's immutable
        withdrawal address and hands the signing capability to the
        operator.
        """
        cfg = self.config
        if msg.caller != cfg.treasury:
            raise WrongCaller(f"{msg.caller} is not the treasury")
        if state.status is not WalletStatus.IDLE:
            raise WrongStatus(f"wallet is {state.status.value}")
        if msg.value != cfg.stake_requirement:
            raise WrongAmount(
                f"stake must be exactly {cfg.stake_requirement}, got {msg.value}")
        st = state.clone()
        st.status = WalletStatus.DEPOSITED
        effects = [
            Emit("Deposited", {"stake": msg.value}),
            Call(cfg.beacon, "submit_deposit",
                 {"withdrawal_address": cfg.self_address, "operator": cfg.operator},
                 value=msg.value),
        ]
        return st, effects, None

    def _op_deposit_accepted(self, state: WalletState, msg: Msg, ctx: CallContext):
        self._require_beacon(msg)
        if state.status is not WalletStatus.DEPOSITED:
            raise WrongStatus(f"wallet is {state.status.value}")
        st = state.clone()
        st.validator_id = msg.args["validator_id"]
        return st, [], None

    def _op_on_validator_activated(self, state: WalletState, msg: Msg, ctx: CallContext):
        self._require_beacon(msg)
        if state.status is not WalletStatus.DEPOSITED:
            raise WrongStatus(f"wallet is {state.status.value}")
        st = state.clone()
        st.status = WalletStatus.ACTIVE
        st.activation_epoch = ctx.epoch
        return st, [], None

    # --- reward forwarding ------------------------------------------------------

    def _op_forward_rewards(self, state: WalletState, msg: Msg, ctx: CallContext):
        """Push the wallet's whole liquid balance to the treasury.

        Records the forwarded amount into the per-epoch reward window, so
        repeated calls within one epoch forward only newly arrived funds
        and accumulate into the same window slot. Once the exit sweep has
        landed, the balance is settlement money and nothing is forwarded.
        """
        if state.status not in (WalletStatus.ACTIVE, WalletStatus.EXIT_REQUESTED):
            raise WrongStatus(f"wallet is {state.status.value}")
        amount = 0 if state.settlement_ready else ctx.balance_of(self.config.self_address)
        st = state.clone()
        st.reward_window[ctx.epoch] = st.reward_window.get(ctx.epoch, 0) + amount
        self._prune_window(st, ctx.epoch)
        effects = []
        if amount > 0:
            st.forwarded_total += amount
            effects.append(Emit("RewardsForwarded", {"amount": amount}))
            effects.append(Call(self.config.treasury, "receive_rewards", {}, value=amount))
        return st, effects, amount

    def _prune_window(self, st: WalletState, now: int) -> None:
        # Only the trailing grace_epochs slots ever matter.
        cutoff = now - self.config.grace_epochs + 1
        for epoch in [e for e in st.reward_window if e < cutoff]:
            del st.reward_window[epoch]

    # --- the watchdog -------------------------------------------------------------

    def _op_watchdog_check(self, state: WalletState, msg: Msg, ctx: CallContext):
        """Exit autonomously when the reward window falls short.

        Evaluates sum(window) < expected_reward_per_epoch * grace_epochs
        over the trailing grace_epochs, current epoch included. The check
        arms only once the window is fully populated since activation, so
        activation-queue delay cannot cause a spurious exit. Returns "Ok"
        or "TriggerExit".
        """
        cfg = self.config
        now = ctx.epoch
        if state.status is not WalletStatus.ACTIVE:
            raise WrongStatus(f"wallet is {state.status.value}")
        if now <= state.last_check_epoch:
            raise WrongStatus(f"watchdog already ran at epoch {state.last_check_epoch}")
        st = state.clone()
        st.last_check_epoch = now
        assert st.activation_epoch is not None
        if now - st.activation_epoch + 1 < cfg.grace_epochs:
            return st, [], "Ok"
        window_sum = sum(
            st.reward_window.get(e, 0)
            for e in range(now - cfg.grace_epochs + 1, now + 1)
        )
        threshold = cfg.expected_reward_per_epoch * cfg.grace_epochs
        if window_sum >= threshold:
            return st, [], "Ok"
        st.status = WalletStatus.EXIT_REQUESTED
        st.exit_cause = CAUSE_PERFORMANCE
        st.exit_epoch = now
        effects = [
            Emit("ExitTriggered", {"validator_id": st.validator_id,
                                   "window_sum": window_sum,
                                   "threshold": threshold}),
            Call(cfg.beacon, "request_exit", {"validator_id": st.validator_id}),
            Call(cfg.treasury, "on_exit_initiated", {"cause": CAUSE_PERFORMANCE}),
        ]
        return st, effects, "TriggerExit"

    def _op_on_forced_exit(self, state: WalletState, msg: Msg, ctx: CallContext):
        """Beacon notification that a slash pushed the validator out."""
        self._require_beacon(msg)
        if state.status is not WalletStatus.ACTIVE:
            raise WrongStatus(f"wallet is {state.status.value}")
        st = state.clone()
        st.status = WalletStatus.EXIT_REQUESTED
        st.exit_cause = CAUSE_SLASHED
        st.exit_epoch = ctx.epoch
        effects = [Call(self.config.treasury, "on_exit_initiated",
                        {"cause": CAUSE_SLASHED})]
        return st, effects, None

    def _op_on_exit_swept(self, state: WalletState, msg: Msg, ctx: CallContext):
        self._require_beacon(msg)
        if state.status is not WalletStatus.EXIT_REQUESTED:
            raise WrongStatus(f"wallet is {state.status.value}")
        st = state.clone()
        st.settlement_ready = True
        st.settlement_amount = msg.args["amount"]
        return st, [], None

    def _op_finalize_withdrawal(self, state: WalletState, msg: Msg, ctx: CallContext):
        """Hand everything to the treasury for settlement.

        Returns (returned, shortfall) where shortfall is what slashing ate
        out of the original stake.
        """
        cfg = self.config
        if state.status is not WalletStatus.EXIT_REQUESTED:
            raise WrongStatus(f"wallet is {state.status.value}")
        if not state.settlement_ready:
            raise BeaconNotSwept("exit balance has not been swept to the wallet yet")
        returned = ctx.balance_of(cfg.self_address)
        shortfall = max(0, cfg.stake_requirement - returned)
        st = state.clone()
        st.status = WalletStatus.WITHDRAWN
        effects = [
            Emit("WithdrawalFinalized", {"returned": returned, "shortfall": shortfall}),
            Call(cfg.treasury, "settle_exit", {}, value=returned),
        ]
        return st, effects, (returned, shortfall)

    def _require_beacon(self, msg: Msg) -> None:
        if msg.caller != self.config.beacon:
            raise WrongCaller(f"{msg.caller} is not the beacon")
