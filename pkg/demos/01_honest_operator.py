"""A well-behaved operator: two validators, two holders, 100 epochs.

Walks through the happy path: the mint fills, the treasury stakes both
validators, rewards flow back every epoch, and the 10% operator fee plus
pro-rata holder split stay integer-exact the whole way.
"""

import stakeclaim as sc

scenario = sc.load_scenario(sc.golden_scenario_path("honest"))
print("== HONEST OPERATOR" + " =" * 25)
print(f"validators: {scenario.treasury.validators}, "
      f"stake each: {scenario.beacon.stake_requirement:,}")
print(f"fee: {scenario.treasury.fee_bps} bps, horizon: {scenario.horizon} epochs")

report = sc.run(scenario)

print(f"\nfinal phase: {report.phase}")
print(f"{'holder':<8}{'capital':>16}{'claimable':>12}")
for h in report.holders:
    print(f"{h.holder:<8}{h.capital:>16,}{h.claimable:>12,}")

total_rewards = sum(v.rewards_received for v in report.validators)
print(f"\nrewards received by treasury: {total_rewards:,}")
print(f"operator fee accrued:         {report.operator_fees_accrued:,}")
print(f"holders split:                {sum(h.claimable for h in report.holders):,}")

# the split is exactly floor(cumulative_net * C_i / total_capital)
net = total_rewards - report.operator_fees_accrued
alice = next(h for h in report.holders if h.holder == "alice")
assert alice.claimable == net * 40_000_000_000 // 64_000_000_000
print("\nholder credit == floor(net * C_i / total capital), exactly")
print(f"conservation: {report.conservation_ok}, "
      f"event-log replay: {report.replay_ok}")
