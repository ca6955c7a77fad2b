"""Simulated smart-contract chain.

The :class:`Ledger` holds accounts with integer balances, a registry of
contracts, an epoch clock, and an append-only event log. Contracts are
message-driven state machines: a handler is a pure function of
``(state, message, context)`` that returns a new state plus a list of
outbound effects (value transfers, events, nested calls, issuance). The
ledger applies effects; handlers never mutate anything directly. This makes
atomicity trivial: a call tree executes against a buffered frame that is
committed only if every step succeeds, so any revert leaves the chain
bit-identical to its pre-call state.

Design constraints honoured throughout:

* Amounts are non-negative integers in a fixed base unit. No floats touch
  any balance. Total supply changes only via explicit issuance or
  destruction, each logged, so conservation is checkable from the event
  log alone (see :func:`replay_balances`).
* Nested calls are capped at depth ``CALL_DEPTH_LIMIT``; exceeding it
  reverts the tree.
* Epochs only move forward. Per-epoch hooks registered on the ledger run
  in registration order, which is what makes two identically-driven runs
  produce byte-identical event logs.

A ledger instance is single-threaded but self-contained; independent
instances can run in parallel threads or processes.
"""

from __future__ import annotations

import json
import pickle
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Protocol

from .errors import (
    InsufficientBalance,
    InvalidAmount,
    ReentrancyLimitExceeded,
    Unauthorized,
    UnknownAddress,
    UnknownContract,
)

CALL_DEPTH_LIMIT = 8


class AddressKind(Enum):
    ACCOUNT = "account"    # externally owned
    CONTRACT = "contract"


@dataclass(frozen=True)
class Event:
    """One log entry, totally ordered by (epoch, seq). seq is global."""

    epoch: int
    seq: int
    emitter: str
    tag: str
    payload: dict

    def to_json(self) -> str:
        # Field order is fixed: this line format is the regression surface.
        return json.dumps(
            {
                "epoch": self.epoch,
                "seq": self.seq,
                "emitter": self.emitter,
                "tag": self.tag,
                "payload": self.payload,
            },
            separators=(",", ":"),
        )


@dataclass(frozen=True)
class Msg:
    """An inbound message as seen by a contract handler."""

    caller: str
    method: str
    args: dict
    value: int = 0


# --- outbound effects -------------------------------------------------------

@dataclass(frozen=True)
class Transfer:
    """Move `amount` from the emitting contract's account to `to`."""

    to: str
    amount: int


@dataclass(frozen=True)
class Emit:
    """Append an event with the emitting contract as the emitter."""

    tag: str
    payload: dict


@dataclass(frozen=True)
class Call:
    """Invoke another contract; the emitting contract becomes the caller."""

    target: str
    method: str
    args: dict = field(default_factory=dict)
    value: int = 0


@dataclass(frozen=True)
class Issue:
    """Create new units in the emitter's own account (issuers only)."""

    amount: int
    memo: str


@dataclass(frozen=True)
class Destroy:
    """Destroy units held in the emitter's own account (issuers only)."""

    amount: int
    memo: str


Effect = Transfer | Emit | Call | Issue | Destroy
HandlerResult = tuple[Any, list, Any]


class Contract(Protocol):
    def initial_state(self) -> Any: ...

    def handle(self, state: Any, msg: Msg, ctx: "CallContext") -> HandlerResult: ...


class CallContext:
    """Read-only view handed to handlers: the clock plus frame-aware reads."""

    __slots__ = ("_ledger", "_frame")

    def __init__(self, ledger: "Ledger", frame: "_TxFrame"):
        self._ledger = ledger
        self._frame = frame

    @property
    def epoch(self) -> int:
        return self._ledger.epoch

    def balance_of(self, name: str) -> int:
        return self._frame.balance_of(name)

    def kind_of(self, name: str) -> AddressKind:
        return self._ledger.kind_of(name)


class _TxFrame:
    """Buffered writes for one call tree. Commit applies; drop reverts."""

    def __init__(self, ledger: "Ledger"):
        self._ledger = ledger
        self._balances: dict[str, int] = {}
        self._states: dict[str, Any] = {}
        self._events: list[tuple[str, str, dict]] = []
        self._minted = 0
        self._burned = 0

    def balance_of(self, name: str) -> int:
        if name not in self._ledger._kinds:
            raise UnknownAddress(name)
        if name in self._balances:
            return self._balances[name]
        return self._ledger._balances[name]

    def state_of(self, name: str) -> Any:
        if name in self._states:
            return self._states[name]
        return self._ledger._states[name]

    def set_state(self, name: str, state: Any) -> None:
        self._states[name] = state

    def move(self, src: str, dst: str, amount: int) -> None:
        if amount <= 0:
            raise InvalidAmount(f"transfer amount must be positive, got {amount}")
        if dst not in self._ledger._kinds:
            raise UnknownAddress(dst)
        have = self.balance_of(src)
        if have < amount:
            raise InsufficientBalance(f"{src} has {have}, needs {amount}")
        self._balances[src] = have - amount
        self._balances[dst] = self.balance_of(dst) + amount
        self.log(src, "Transfer", {"from": src, "to": dst, "amount": amount})

    def issue(self, name: str, amount: int, memo: str) -> None:
        if amount < 0:
            raise InvalidAmount(f"issue amount must be non-negative, got {amount}")
        if amount == 0:
            return
        self._balances[name] = self.balance_of(name) + amount
        self._minted += amount
        self.log(name, "SupplyMint", {"to": name, "amount": amount, "memo": memo})

    def destroy(self, name: str, amount: int, memo: str) -> None:
        if amount < 0:
            raise InvalidAmount(f"destroy amount must be non-negative, got {amount}")
        if amount == 0:
            return
        have = self.balance_of(name)
        if have < amount:
            raise InsufficientBalance(f"{name} has {have}, cannot destroy {amount}")
        self._balances[name] = have - amount
        self._burned += amount
        self.log(name, "SupplyBurn", {"from": name, "amount": amount, "memo": memo})

    def log(self, emitter: str, tag: str, payload: dict) -> None:
        self._events.append((emitter, tag, payload))

    def commit(self) -> None:
        led = self._ledger
        led._balances.update(self._balances)
        led._states.update(self._states)
        led.minted_total += self._minted
        led.burned_total += self._burned
        for emitter, tag, payload in self._events:
            led._append_event(emitter, tag, payload)


class Ledger:
    """One simulated chain instance.

    Not thread-safe; use one instance per thread. All state lives on the
    instance, so independent scenarios can run concurrently without any
    shared globals.
    """

    def __init__(self):
        self._kinds: dict[str, AddressKind] = {}
        self._balances: dict[str, int] = {}
        self._contracts: dict[str, Contract] = {}
        self._states: dict[str, Any] = {}
        self._issuers: set[str] = set()
        self.epoch = 0
        self.events: list[Event] = []
        self.minted_total = 0
        self.burned_total = 0
        self._seq = 0
        self._hooks: list[Callable[[], None]] = []

    # --- registration -------------------------------------------------

    def register_account(self, name: str) -> str:
        """Register an externally-owned account with zero balance."""
        self._register(name, AddressKind.ACCOUNT)
        return name

    def register_contract(self, name: str, contract: Contract, issuer: bool = False) -> str:
        """Register a contract and its initial state.

        `issuer=True` grants the contract the right to create and destroy
        units in its own account (the consensus layer uses this for reward
        issuance and slashing; nothing else may).
        """
        self._register(name, AddressKind.CONTRACT)
        self._contracts[name] = contract
        self._states[name] = contract.initial_state()
        if issuer:
            self._issuers.add(name)
        return name

    def _register(self, name: str, kind: AddressKind) -> None:
        if name in self._kinds:
            raise ValueError(f"address {name!r} already registered")
        self._kinds[name] = kind
        self._balances[name] = 0

    # --- reads ----------------------------------------------------------

    def kind_of(self, name: str) -> AddressKind:
        if name not in self._kinds:
            raise UnknownAddress(name)
        return self._kinds[name]

    def is_contract(self, name: str) -> bool:
        return self._kinds.get(name) is AddressKind.CONTRACT

    def balance_of(self, name: str) -> int:
        if name not in self._kinds:
            raise UnknownAddress(name)
        return self._balances[name]

    def contract_state(self, name: str) -> Any:
        """Committed state of a contract. Callers must treat it read-only."""
        if name not in self._contracts:
            raise UnknownContract(name)
        return self._states[name]

    def total_balance(self) -> int:
        return sum(self._balances.values())

    # --- direct operations (outside any call tree) ----------------------

    def genesis(self, to: str, amount: int, memo: str = "genesis") -> None:
        """Endow an account with newly created units; logged as a Mint."""
        if to not in self._kinds:
            raise UnknownAddress(to)
        if amount <= 0:
            raise InvalidAmount(f"genesis amount must be positive, got {amount}")
        self._balances[to] += amount
        self.minted_total += amount
        self._append_event(to, "SupplyMint", {"to": to, "amount": amount, "memo": memo})

    def transfer(self, src: str, dst: str, amount: int) -> None:
        """Move value between accounts, atomically. Zero amounts rejected."""
        frame = _TxFrame(self)
        frame.move(src, dst, amount)
        frame.commit()

    def emit(self, emitter: str, tag: str, payload: dict) -> None:
        """Append a driver-level event outside any call tree."""
        if emitter not in self._kinds:
            raise UnknownAddress(emitter)
        self._append_event(emitter, tag, payload)

    # --- contract dispatch ----------------------------------------------

    def call(self, caller: str, target: str, method: str,
             args: dict | None = None, value: int = 0) -> Any:
        """Dispatch a message to a contract and commit the whole call tree.

        Any LedgerError or ContractError raised anywhere in the tree
        propagates to the caller and nothing is applied: no balance, no
        contract state, no event.
        """
        if caller not in self._kinds:
            raise UnknownAddress(caller)
        frame = _TxFrame(self)
        result = self._dispatch(frame, caller, target, method, dict(args or {}), value, 0)
        frame.commit()
        return result

    def _dispatch(self, frame: _TxFrame, caller: str, target: str, method: str,
                  args: dict, value: int, depth: int) -> Any:
        if depth > CALL_DEPTH_LIMIT:
            raise ReentrancyLimitExceeded(f"call depth exceeded {CALL_DEPTH_LIMIT}")
        contract = self._contracts.get(target)
        if contract is None:
            raise UnknownContract(target)
        frame.log(caller, "Call", {"caller": caller, "target": target, "method": method})
        if value:
            frame.move(caller, target, value)
        ctx = CallContext(self, frame)
        state, effects, result = contract.handle(
            frame.state_of(target), Msg(caller, method, args, value), ctx
        )
        frame.set_state(target, state)
        for eff in effects:
            if isinstance(eff, Transfer):
                frame.move(target, eff.to, eff.amount)
            elif isinstance(eff, Emit):
                frame.log(target, eff.tag, eff.payload)
            elif isinstance(eff, Call):
                self._dispatch(frame, target, eff.target, eff.method,
                               dict(eff.args), eff.value, depth + 1)
            elif isinstance(eff, Issue):
                if target not in self._issuers:
                    raise Unauthorized(f"{target} is not an issuer")
                frame.issue(target, eff.amount, eff.memo)
            elif isinstance(eff, Destroy):
                if target not in self._issuers:
                    raise Unauthorized(f"{target} is not an issuer")
                frame.destroy(target, eff.amount, eff.memo)
            else:
                raise TypeError(f"unknown effect {eff!r}")
        return result

    # --- time -------------------------------------------------------------

    def add_epoch_hook(self, hook: Callable[[], None]) -> None:
        """Register a callable run on every advance_epoch, in fixed order."""
        self._hooks.append(hook)

    def advance_epoch(self) -> int:
        self.epoch += 1
        for hook in self._hooks:
            hook()
        return self.epoch

    # --- event log ---------------------------------------------------------

    def _append_event(self, emitter: str, tag: str, payload: dict) -> None:
        self.events.append(Event(self.epoch, self._seq, emitter, tag, payload))
        self._seq += 1

    def events_jsonl(self) -> str:
        """The whole log as JSON lines, one event per line."""
        return "".join(e.to_json() + "\n" for e in self.events)

    # --- snapshots ---------------------------------------------------------

    def snapshot(self) -> bytes:
        """Serialize all mutable state; pair with :meth:`restore`."""
        return pickle.dumps((
            self._balances, self._states, self.epoch,
            self.minted_total, self.burned_total, self._seq, self.events,
        ))

    def restore(self, snap: bytes) -> None:
        (self._balances, self._states, self.epoch,
         self.minted_total, self.burned_total, self._seq, self.events) = pickle.loads(snap)


# --- post-hoc conservation check from the log alone --------------------------

@dataclass
class ReplayResult:
    balances: dict[str, int]
    minted_by_epoch: dict[int, int]
    burned_by_epoch: dict[int, int]
    delta_by_epoch: dict[int, int]


def replay_balances(events: list[Event]) -> ReplayResult:
    """Reconstruct balances and per-epoch supply deltas from events only.

    Folds SupplyMint, SupplyBurn and Transfer events. For a well-behaved ledger the
    reconstructed balances equal the live ones and, for every epoch,
    delta == minted - burned.
    """
    balances: dict[str, int] = {}
    minted: dict[int, int] = {}
    burned: dict[int, int] = {}
    delta: dict[int, int] = {}
    for e in events:
        p = e.payload
        if e.tag == "SupplyMint":
            balances[p["to"]] = balances.get(p["to"], 0) + p["amount"]
            minted[e.epoch] = minted.get(e.epoch, 0) + p["amount"]
            delta[e.epoch] = delta.get(e.epoch, 0) + p["amount"]
        elif e.tag == "SupplyBurn":
            balances[p["from"]] = balances.get(p["from"], 0) - p["amount"]
            burned[e.epoch] = burned.get(e.epoch, 0) + p["amount"]
            delta[e.epoch] = delta.get(e.epoch, 0) - p["amount"]
        elif e.tag == "Transfer":
            balances[p["from"]] = balances.get(p["from"], 0) - p["amount"]
            balances[p["to"]] = balances.get(p["to"], 0) + p["amount"]
            delta.setdefault(e.epoch, 0)
    return ReplayResult(balances, minted, burned, delta)
