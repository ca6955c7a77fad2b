"""Shared test world builder.

Unit tests drive the contracts step by step with small round numbers, so a
compact hand-wired world (no scenario engine, no epoch hooks) keeps each
test explicit about what happens when.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import pytest

from stakeclaim.beacon import BeaconContract, BeaconParams
from stakeclaim.ledger import Ledger
from stakeclaim.mint import MintConfig, MintContract
from stakeclaim.treasury import TreasuryConfig, TreasuryContract, balance_identity
from stakeclaim.wallet import ValidatorWallet, WalletConfig

SYSTEM = "system"
OPERATOR = "operator"
MINT = "mint"
TREASURY = "treasury"
BEACON = "beacon"


@dataclass
class Mini:
    """A wired arrangement driven manually by tests."""

    ledger: Ledger
    stake: int
    m: int
    fee_bps: int
    wallets: list[str] = field(default_factory=list)

    # -- driving shortcuts --------------------------------------------------

    def mint(self, holder: str, amount: int):
        return self.ledger.call(holder, MINT, "mint", {}, value=amount)

    def post_escrow(self, amount: int):
        return self.ledger.call(OPERATOR, TREASURY, "post_escrow", {}, value=amount)

    def stake_all(self):
        return self.ledger.call(SYSTEM, TREASURY, "stake_all", {})

    def accrue(self, performance: dict | None = None):
        return self.ledger.call(SYSTEM, BEACON, "accrue_epoch",
                                {"performance": performance or {}})

    def sweep(self):
        return self.ledger.call(SYSTEM, BEACON, "sweep", {})

    def forward(self, j: int = 0):
        return self.ledger.call(SYSTEM, self.wallets[j], "forward_rewards", {})

    def watchdog(self, j: int = 0):
        return self.ledger.call(SYSTEM, self.wallets[j], "watchdog_check", {})

    def finalize(self, j: int = 0):
        return self.ledger.call(SYSTEM, self.wallets[j], "finalize_withdrawal", {})

    def slash(self, vid: int, bps: int):
        return self.ledger.call(SYSTEM, BEACON, "slash",
                                {"validator_id": vid, "fraction_bps": bps})

    def claim(self, holder: str):
        return self.ledger.call(holder, TREASURY, "claim", {})

    def transfer_nft(self, token_id: int, frm: str, to: str):
        return self.ledger.call(frm, MINT, "transfer_nft",
                                {"token_id": token_id, "to": to})

    # -- state reads ---------------------------------------------------------

    @property
    def treasury_state(self):
        return self.ledger.contract_state(TREASURY)

    @property
    def mint_state(self):
        return self.ledger.contract_state(MINT)

    @property
    def beacon_state(self):
        return self.ledger.contract_state(BEACON)

    def wallet_state(self, j: int = 0):
        return self.ledger.contract_state(self.wallets[j])

    def check_treasury_identity(self):
        assert self.ledger.balance_of(TREASURY) == balance_identity(self.treasury_state)


def make_world(m: int = 1, stake: int = 64, fee_bps: int = 1000,
               expected: int = 2, grace: int = 3, escrow_required: int = 0,
               min_contribution: int = 1, open_epoch: int = 0, close_epoch: int = 100,
               reward: int = 100, activation_delay: int = 1, exit_delay: int = 2,
               sweep_period: int = 1,
               holders: dict[str, int] | None = None) -> Mini:
    led = Ledger()
    led.register_account(SYSTEM)
    led.register_account(OPERATOR)
    for name, endowment in (holders or {"alice": 1000, "bob": 1000}).items():
        led.register_account(name)
        if endowment:
            led.genesis(name, endowment)
    led.genesis(OPERATOR, 10_000)

    led.register_contract(BEACON, BeaconContract(BeaconParams(
        stake_requirement=stake, reward_per_epoch=reward,
        activation_delay=activation_delay, exit_delay=exit_delay,
        sweep_period=sweep_period), driver=SYSTEM), issuer=True)
    wallets = [f"wallet:{j}" for j in range(m)]
    for w in wallets:
        led.register_contract(w, ValidatorWallet(WalletConfig(
            self_address=w, treasury=TREASURY, beacon=BEACON, operator=OPERATOR,
            stake_requirement=stake, expected_reward_per_epoch=expected,
            grace_epochs=grace)))
    led.register_contract(TREASURY, TreasuryContract(TreasuryConfig(
        fee_bps=fee_bps, expected_reward_per_epoch=expected, grace_epochs=grace,
        operator=OPERATOR, escrow_required=escrow_required,
        stake_requirement=stake, mint=MINT), validators=tuple(wallets)))
    led.register_contract(MINT, MintContract(MintConfig(
        treasury=TREASURY, min_contribution=min_contribution,
        target_total=stake * m, open_epoch=open_epoch, close_epoch=close_epoch)))
    return Mini(ledger=led, stake=stake, m=m, fee_bps=fee_bps, wallets=wallets)


@pytest.fixture
def world() -> Mini:
    """Default single-validator world: stake 64, 10% fee, alice and bob funded."""
    return make_world()


@pytest.fixture
def staked_world() -> Mini:
    """World already staked with capitals alice=40, bob=24 and validator active."""
    w = make_world(escrow_required=10)
    w.post_escrow(10)
    w.mint("alice", 40)
    w.mint("bob", 24)
    w.stake_all()
    w.ledger.advance_epoch()          # epoch 1: activation_delay=1 reached
    w.accrue()                        # activates the validator
    return w
