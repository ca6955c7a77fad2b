"""Capital-raising contract.

Collects depositor capital during a fixed epoch window, forwards every unit
to the treasury, and issues one NFT per contribution recording how much the
depositor put in. Ownership of a token carries the right to that share of
future rewards, so transfers are mirrored to the treasury registry in the
same atomic call tree.

Contributions are variable-size (per-holder capital differs) and a
contribution that would push the total past the target is rejected whole:
the raised total must land exactly on the target, never above it. If the
window closes under-filled, anyone may poke ``abort`` and the treasury
refunds every depositor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BelowMinimum, ExceedsCapacity, InvalidAmount, MintClosed, NotOwner, UnknownToken, WrongStatus
from .ledger import Call, CallContext, Emit, Msg, Transfer


@dataclass(frozen=True)
class MintConfig:
    treasury: str
    min_contribution: int
    target_total: int
    open_epoch: int
    close_epoch: int

    def __post_init__(self):
        if self.min_contribution <= 0:
            raise ValueError("min_contribution must be positive")
        if self.target_total <= 0:
            raise ValueError("target_total must be positive")
        if not (0 <= self.open_epoch < self.close_epoch):
            raise ValueError("need 0 <= open_epoch < close_epoch")


@dataclass(frozen=True)
class NftRecord:
    """One minted share: who owns it and how much capital it represents."""

    token_id: int
    owner: str
    capital: int
    minted_at: int


@dataclass
class MintState:
    owners: dict[int, str] = field(default_factory=dict)
    minted_total: int = 0
    next_token_id: int = 0
    aborted: bool = False

    def clone(self) -> "MintState":
        return MintState(dict(self.owners), self.minted_total,
                         self.next_token_id, self.aborted)


class MintContract:
    """Handler for mint, NFT transfer, and under-fill abort messages."""

    def __init__(self, config: MintConfig):
        self.config = config

    def initial_state(self) -> MintState:
        return MintState()

    def handle(self, state: MintState, msg: Msg, ctx: CallContext):
        method = getattr(self, "_op_" + msg.method, None)
        if method is None:
            raise InvalidAmount(f"mint has no method {msg.method!r}")
        return method(state, msg, ctx)

    def _op_mint(self, state: MintState, msg: Msg, ctx: CallContext):
        """Exchange the attached value for a new token; returns the token id."""
        cfg = self.config
        if state.aborted or not (cfg.open_epoch <= ctx.epoch < cfg.close_epoch):
            raise MintClosed(f"mint not open at epoch {ctx.epoch}")
        if state.minted_total + msg.value > cfg.target_total:
            raise ExceedsCapacity(
                f"{msg.value} would overshoot target {cfg.target_total} "
                f"(minted {state.minted_total}); rejected whole")
        if msg.value < cfg.min_contribution:
            raise BelowMinimum(f"contribution {msg.value} below minimum {cfg.min_contribution}")
        st = state.clone()
        token_id = st.next_token_id
        st.next_token_id += 1
        st.owners[token_id] = msg.caller
        st.minted_total += msg.value
        effects = [
            Transfer(cfg.treasury, msg.value),
            Call(cfg.treasury, "register_nft", {
                "token_id": token_id, "owner": msg.caller,
                "capital": msg.value, "minted_at": ctx.epoch,
            }),
            Emit("Mint", {"token_id": token_id, "owner": msg.caller,
                          "capital": msg.value}),
        ]
        return st, effects, token_id

    def _op_transfer_nft(self, state: MintState, msg: Msg, ctx: CallContext):
        """Move a token to a new owner; future reward credits follow it.

        Credits already accrued stay claimable by the previous owner. A
        self-transfer succeeds without emitting or mirroring anything.
        """
        token_id = msg.args["token_id"]
        to = msg.args["to"]
        owner = state.owners.get(token_id)
        if owner is None:
            raise UnknownToken(f"no token {token_id}")
        if msg.caller != owner:
            raise NotOwner(f"{msg.caller} does not own token {token_id}")
        ctx.kind_of(to)  # raises UnknownAddress for unregistered recipients
        if to == owner:
            return state, [], None
        st = state.clone()
        st.owners[token_id] = to
        effects = [
            Call(self.config.treasury, "update_owner",
                 {"token_id": token_id, "from": owner, "to": to}),
            Emit("TransferNft", {"token_id": token_id, "from": owner, "to": to}),
        ]
        return st, effects, None

    def _op_abort(self, state: MintState, msg: Msg, ctx: CallContext):
        """Refund everyone after an under-filled window. Permissionless."""
        cfg = self.config
        if state.aborted:
            raise WrongStatus("mint already aborted")
        if state.minted_total == cfg.target_total:
            raise WrongStatus("mint filled; nothing to abort")
        if ctx.epoch < cfg.close_epoch:
            raise WrongStatus(f"window still open until epoch {cfg.close_epoch}")
        st = state.clone()
        st.aborted = True
        effects = [
            Call(cfg.treasury, "abort_refund", {}),
            Emit("MintAborted", {"refunded": st.minted_total}),
        ]
        return st, effects, st.minted_total
