"""Treasury accounting: fee split, dust carry, claims, staking, settlement."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import BEACON, OPERATOR, SYSTEM, TREASURY, Mini, make_world
from oracle import rational_shares, replay_split
from stakeclaim.errors import (
    AlreadySettled,
    EscrowMissing,
    InvalidAmount,
    NotOperator,
    NothingToClaim,
    Underfunded,
    UnknownValidator,
    WrongPhase,
)
from stakeclaim.mint import NftRecord
from stakeclaim.treasury import Phase, reward_receipts, split_credits
from stakeclaim.wallet import WalletStatus


def receive(w: Mini, amount: int, j: int = 0):
    """Deliver a reward receipt by funding the wallet and forwarding."""
    if w.wallet_state(j).status is WalletStatus.DEPOSITED:
        w.ledger.advance_epoch()
        w.accrue({w.wallet_state(j).validator_id: 0})  # activate, no reward
    w.ledger.genesis(w.wallets[j], amount, "test rewards")
    return w.ledger.call(SYSTEM, w.wallets[j], "forward_rewards", {})


class TestSplitCredits:
    def test_worked_example_40_24(self):
        registry = {0: NftRecord(0, "alice", 40, 0), 1: NftRecord(1, "bob", 24, 0)}
        credits, dust = split_credits(900, registry, 64, {})
        assert credits == [[0, "alice", 562], [1, "bob", 337]]
        assert dust == 1

    def test_exact_split_no_dust(self):
        registry = {0: NftRecord(0, "a", 1, 0), 1: NftRecord(1, "b", 1, 0)}
        credits, dust = split_credits(100, registry, 2, {})
        assert [c[2] for c in credits] == [50, 50]
        assert dust == 0

    def test_remainders_release_on_later_splits(self):
        registry = {0: NftRecord(0, "alice", 40, 0), 1: NftRecord(1, "bob", 24, 0)}
        remainders = {}
        first, _ = split_credits(900, registry, 64, remainders)
        second, _ = split_credits(900, registry, 64, remainders)
        assert [c[2] for c in first] == [562, 337]
        assert [c[2] for c in second] == [563, 338]  # the carried halves pay out


class TestReceiveRewards:
    def test_fee_and_split_frozen_values(self, staked_world):
        w = staked_world
        receive(w, 1000)
        ts = w.treasury_state
        assert ts.operator_fees_accrued == 100
        assert ts.claimable == {"alice": 562, "bob": 337}
        assert ts.dust == 1
        assert ts.rewards_received == {0: 1000}
        assert ts.receipt_count == 1
        w.check_treasury_identity()

    def test_remainders_carry_into_next_receipt(self, staked_world):
        w = staked_world
        receive(w, 1000)   # net 900 -> [562, 337], 2 half-units carried
        receive(w, 1000)   # net 900 -> [563, 338], carry released
        ts = w.treasury_state
        assert ts.claimable == {"alice": 562 + 563, "bob": 337 + 338}
        assert ts.dust == 0
        # cumulative credit is exactly floor(cumulative_net * C_i / sum_C)
        assert ts.claimable["alice"] == (1800 * 40) // 64
        assert ts.claimable["bob"] == (1800 * 24) // 64
        w.check_treasury_identity()

    def test_stranger_is_unknown_validator(self, staked_world):
        with pytest.raises(UnknownValidator):
            staked_world.ledger.call("alice", TREASURY, "receive_rewards", {}, value=5)

    def test_zero_amount_rejected_no_receipt(self, staked_world):
        w = staked_world
        with pytest.raises(InvalidAmount):
            w.ledger.call(SYSTEM, w.wallets[0], "forward_", {})  # bogus method also rejected
        snap = w.ledger.snapshot()
        with pytest.raises(InvalidAmount):
            w.ledger.call(w.wallets[0], TREASURY, "receive_rewards", {}, value=0)
        assert w.ledger.snapshot() == snap
        assert w.treasury_state.receipt_count == 0

    def test_wrong_phase_before_staking(self, world):
        world.mint("alice", 64)
        world.ledger.genesis(world.wallets[0], 1, "test")
        with pytest.raises(WrongPhase):
            world.ledger.call(world.wallets[0], TREASURY, "receive_rewards", {}, value=1)

    def test_zero_fee_boundary(self):
        w = make_world(fee_bps=0)
        w.mint("alice", 40)
        w.mint("bob", 24)
        w.stake_all()
        receive(w, 1000)
        ts = w.treasury_state
        assert ts.operator_fees_accrued == 0
        assert sum(ts.claimable.values()) + ts.dust == 1000

    def test_single_holder_gets_exactly_net(self):
        w = make_world(fee_bps=2500)
        w.mint("alice", 64)
        w.stake_all()
        receive(w, 1000)
        ts = w.treasury_state
        assert ts.operator_fees_accrued == 250
        assert ts.claimable == {"alice": 750}
        assert ts.dust == 0

    def test_full_fee_boundary(self):
        w = make_world(fee_bps=10_000)
        w.mint("alice", 64)
        w.stake_all()
        receive(w, 1000)
        ts = w.treasury_state
        assert ts.operator_fees_accrued == 1000
        assert ts.claimable.get("alice", 0) == 0


class TestClaims:
    def test_claim_transfers_and_zeroes(self, staked_world):
        w = staked_world
        receive(w, 1000)
        before = w.ledger.balance_of("alice")
        assert w.claim("alice") == 562
        assert w.ledger.balance_of("alice") == before + 562
        assert w.treasury_state.claimable["alice"] == 0
        w.check_treasury_identity()

    def test_double_claim(self, staked_world):
        w = staked_world
        receive(w, 1000)
        w.claim("alice")
        with pytest.raises(NothingToClaim):
            w.claim("alice")

    def test_operator_fee_payouts_match_oracle(self, staked_world):
        w = staked_world
        amounts = [1000, 777, 31, 4999, 12, 1000]
        for a in amounts:
            receive(w, a)
        receipts = reward_receipts(w.ledger.events)
        assert [r.amount for r in receipts] == amounts
        assert sum(r.amount for r in receipts) == w.treasury_state.rewards_received[0]
        fees, _, _, _ = replay_split(amounts, [40, 24], 1000)
        paid = w.ledger.call(OPERATOR, TREASURY, "claim_operator_fees", {})
        assert paid == fees == sum((a * 1000) // 10_000 for a in amounts)
        assert w.treasury_state.operator_fees_accrued == 0
        # bounded against the real-valued formula: |paid - R*F| < receipt count
        exact = sum(amounts) * 1000 / 10_000
        assert abs(paid - exact) < len(amounts)

    def test_operator_fee_zero_fee_never_claimable(self):
        w = make_world(fee_bps=0)
        w.mint("alice", 64)
        w.stake_all()
        receive(w, 1000)
        with pytest.raises(NothingToClaim):
            w.ledger.call(OPERATOR, TREASURY, "claim_operator_fees", {})

    def test_non_operator_cannot_claim_fees(self, staked_world):
        receive(staked_world, 1000)
        with pytest.raises(NotOperator):
            staked_world.ledger.call("alice", TREASURY, "claim_operator_fees", {})


class TestStakeAll:
    def test_happy_path(self):
        w = make_world(m=2, stake=32, escrow_required=10)
        w.post_escrow(10)
        w.mint("alice", 40)
        w.mint("bob", 24)
        w.stake_all()
        ts = w.treasury_state
        assert ts.phase is Phase.STAKED
        assert ts.principal == 0 and ts.principal_staked == 64
        assert w.ledger.balance_of(BEACON) == 64
        for j in range(2):
            assert w.wallet_state(j).status is WalletStatus.DEPOSITED
        assert len(w.beacon_state.validators) == 2
        w.check_treasury_identity()

    def test_escrow_missing(self):
        w = make_world(escrow_required=10)
        w.mint("alice", 64)
        snap = w.ledger.snapshot()
        with pytest.raises(EscrowMissing):
            w.stake_all()
        assert w.ledger.snapshot() == snap

    def test_underfunded(self, world):
        world.mint("alice", 40)
        with pytest.raises(Underfunded):
            world.stake_all()

    def test_second_stake_is_wrong_phase(self, world):
        world.mint("alice", 64)
        world.stake_all()
        with pytest.raises(WrongPhase):
            world.stake_all()


def settle(w: Mini, returned: int, cause: str = "performance", j: int = 0):
    """Drive settle_exit directly through the wallet address."""
    w.ledger.call(w.wallets[j], TREASURY, "on_exit_initiated", {"cause": cause})
    if returned:
        w.ledger.genesis(w.wallets[j], returned, "test exit balance")
    return w.ledger.call(w.wallets[j], TREASURY, "settle_exit", {}, value=returned)


class TestSettleExit:
    def test_full_principal_identity_payout(self, staked_world):
        w = staked_world
        settle(w, 64, cause="slashed")
        ts = w.treasury_state
        assert ts.claimable == {"alice": 40, "bob": 24}
        assert ts.dust == 0
        assert ts.phase is Phase.SETTLED
        w.check_treasury_identity()

    def test_shortfall_fully_covered_by_escrow(self):
        w = make_world(stake=6400, escrow_required=200,
                       holders={"alice": 10_000, "bob": 10_000})
        w.post_escrow(200)
        w.mint("alice", 4000)
        w.mint("bob", 2400)
        w.stake_all()
        settle(w, 6300, cause="slashed")   # short 100, escrow 200
        ts = w.treasury_state
        assert ts.claimable == {"alice": 4000, "bob": 2400}  # made whole exactly
        assert ts.escrow_balance == 0                        # 100 used, 100 refunded
        assert ts.escrow_refunded == 100
        assert ts.settlements[0].escrow_cover == 100
        w.check_treasury_identity()

    def test_shortfall_beyond_escrow_borne_pro_rata(self):
        w = make_world(stake=6400, escrow_required=40,
                       holders={"alice": 10_000, "bob": 10_000})
        w.post_escrow(40)
        w.mint("alice", 4000)
        w.mint("bob", 2400)
        w.stake_all()
        settle(w, 6300, cause="slashed")   # short 100, escrow only 40
        ts = w.treasury_state
        pot = 6300 + 40
        expect_alice = (pot * 4000) // 6400
        expect_bob = (pot * 2400) // 6400
        assert ts.claimable == {"alice": expect_alice, "bob": expect_bob}
        assert ts.dust == pot - expect_alice - expect_bob
        assert ts.escrow_balance == 0 and ts.escrow_refunded == 0
        w.check_treasury_identity()

    def test_performance_exit_pays_escrow_penalty(self):
        w = make_world(stake=6400, escrow_required=64,
                       holders={"alice": 10_000, "bob": 10_000})
        w.post_escrow(64)
        w.mint("alice", 4000)
        w.mint("bob", 2400)
        w.stake_all()
        settle(w, 6400, cause="performance")
        ts = w.treasury_state
        # full principal + full escrow as penalty, split 4000:2400
        assert ts.settlements[0].penalty == 64
        assert ts.claimable == {"alice": 4040, "bob": 2424}
        assert ts.dust == 0
        w.check_treasury_identity()

    def test_settle_twice_rejected(self, staked_world):
        w = staked_world
        settle(w, 64, cause="slashed")
        w2 = w.ledger
        with pytest.raises(WrongPhase):
            # phase is already Settled; a second settle cannot slip through
            w2.call(w.wallets[0], TREASURY, "settle_exit", {}, value=0)

    def test_settle_same_validator_twice_in_exiting_phase(self):
        w = make_world(m=2, stake=32)
        w.mint("alice", 40)
        w.mint("bob", 24)
        w.stake_all()
        settle(w, 32, cause="slashed", j=0)
        assert w.treasury_state.phase is Phase.EXITING
        with pytest.raises(AlreadySettled):
            w.ledger.call(w.wallets[0], TREASURY, "settle_exit", {}, value=0)

    def test_settle_before_exiting_phase_rejected(self, staked_world):
        w = staked_world
        with pytest.raises(WrongPhase):
            w.ledger.call(w.wallets[0], TREASURY, "settle_exit", {}, value=0)

    def test_multi_validator_settlement_reaches_settled(self):
        w = make_world(m=2, stake=32, escrow_required=10)
        w.post_escrow(10)
        w.mint("alice", 40)
        w.mint("bob", 24)
        w.stake_all()
        settle(w, 32, cause="performance", j=0)
        assert w.treasury_state.phase is Phase.EXITING
        assert w.treasury_state.settlements[0].penalty == 5   # 10 // 2 unsettled
        settle(w, 32, cause="performance", j=1)
        ts = w.treasury_state
        assert ts.phase is Phase.SETTLED
        assert ts.settlements[1].penalty == 5                 # 5 // 1 remaining
        assert ts.escrow_balance == 0
        w.check_treasury_identity()


class TestPhaseMachine:
    def test_no_skip_from_fundraising_to_exiting(self, world):
        world.mint("alice", 64)
        with pytest.raises(WrongPhase):
            world.ledger.call(world.wallets[0], TREASURY, "on_exit_initiated",
                              {"cause": "performance"})

    def test_settled_is_terminal(self, staked_world):
        w = staked_world
        settle(w, 64, cause="slashed")
        w.ledger.genesis(w.wallets[0], 5, "test")
        for caller, method, kwargs in (
            (SYSTEM, "stake_all", {}),
            (w.wallets[0], "receive_rewards", {"value": 5}),
            (OPERATOR, "post_escrow", {"value": 5}),
        ):
            with pytest.raises(WrongPhase):
                w.ledger.call(caller, TREASURY, method, {}, **kwargs)


# --- property tests -------------------------------------------------------------

capitals_strategy = st.lists(st.integers(min_value=1, max_value=10_000),
                             min_size=1, max_size=6)


class TestDistributionProperties:
    @settings(max_examples=80, deadline=None)
    @given(capitals=capitals_strategy,
           amounts=st.lists(st.integers(min_value=1, max_value=10 ** 9),
                            min_size=1, max_size=30),
           fee_bps=st.integers(min_value=0, max_value=10_000))
    def test_per_receipt_identity_and_oracle_match(self, capitals, amounts, fee_bps):
        registry = {i: NftRecord(i, f"h{i}", c, 0) for i, c in enumerate(capitals)}
        total_cap = sum(capitals)
        remainders: dict[int, int] = {}
        dust = 0
        credits = [0] * len(capitals)
        fees = 0
        net_total = 0
        for amount in amounts:
            fee = (amount * fee_bps) // 10_000
            net = amount - fee
            per_token, undistributed = split_credits(net, registry, total_cap,
                                                     remainders)
            # exact conservation per receipt
            assert fee + sum(c[2] for c in per_token) + undistributed == amount
            for i, (_, _, share) in enumerate(per_token):
                credits[i] += share
            fees += fee
            dust += undistributed
            net_total += net
        o_fees, o_credits, o_dust, _ = replay_split(amounts, capitals, fee_bps)
        assert (fees, credits, dust) == (o_fees, o_credits, o_dust)
        # cumulative conservation, zero tolerance
        assert fees + sum(credits) + dust == sum(amounts)
        # cumulative credit is exactly the floor of the cumulative pro-rata
        for i, c in enumerate(capitals):
            assert credits[i] == (net_total * c) // total_cap
        # per-holder bound against the exact rational share: < receipt count
        shares = rational_shares(sum(amounts), capitals, fee_bps)
        for got, want in zip(credits, shares):
            assert abs(got - want) < max(len(amounts), 1)

    @settings(max_examples=40, deadline=None)
    @given(capitals=capitals_strategy,
           scale=st.integers(min_value=2, max_value=1000),
           total=st.integers(min_value=1, max_value=10 ** 9),
           fee_bps=st.integers(min_value=0, max_value=10_000))
    def test_rational_shares_invariant_under_capital_scaling(
            self, capitals, scale, total, fee_bps):
        base = rational_shares(total, capitals, fee_bps)
        scaled = rational_shares(total, [c * scale for c in capitals], fee_bps)
        assert base == scaled

    @settings(max_examples=40, deadline=None)
    @given(capitals=st.lists(st.integers(min_value=1, max_value=1000),
                             min_size=2, max_size=4),
           amounts=st.lists(st.integers(min_value=10 ** 3, max_value=10 ** 6),
                            min_size=5, max_size=40))
    def test_pro_rata_fairness_bound(self, capitals, amounts):
        _, credits, _, _ = replay_split(amounts, capitals, 0)
        k = len(amounts)
        for i in range(len(capitals)):
            for j in range(len(capitals)):
                if credits[j] == 0:
                    continue
                cap_ratio = capitals[i] / capitals[j]
                ratio_err = abs(credits[i] / credits[j] - cap_ratio)
                # each credit is within one unit of exact pro-rata
                assert ratio_err <= (cap_ratio + 1) / credits[j] + 1e-9
                if k >= cap_ratio + 1:
                    assert ratio_err <= k / credits[j] + 1e-9
