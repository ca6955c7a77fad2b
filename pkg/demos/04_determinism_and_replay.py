"""The event log is the whole truth.

Two runs of the same scenario produce byte-identical logs, and the log
alone is enough to rebuild every balance and re-check conservation epoch
by epoch: total supply moves only when the beacon mints rewards or a
slash burns stake.
"""

import stakeclaim as sc
from stakeclaim.scenario import World

scenario = sc.load_scenario(sc.golden_scenario_path("slashed"))
print("== DETERMINISM AND REPLAY" + " =" * 20)

first = sc.run(scenario)
second = sc.run(scenario)
print(f"run 1 digest: {first.events_digest}")
print(f"run 2 digest: {second.events_digest}")
assert first.events_jsonl == second.events_jsonl
assert first.to_json() == second.to_json()
print("byte-identical: yes")

world = World(scenario)
report = world.run()
replay = sc.replay_balances(world.ledger.events)

print(f"\nevents: {report.event_count}, minted {report.minted:,}, "
      f"burned {report.burned:,}")
mismatches = sum(
    1 for name in replay.balances
    if replay.balances[name] != world.ledger.balance_of(name))
print(f"balances rebuilt from the log alone: "
      f"{len(replay.balances)} accounts, {mismatches} mismatches")

bad_epochs = [
    e for e in range(report.final_epoch + 1)
    if replay.delta_by_epoch.get(e, 0)
    != replay.minted_by_epoch.get(e, 0) - replay.burned_by_epoch.get(e, 0)]
print(f"epochs where delta != minted - burned: {bad_epochs or 'none'}")
slash_epoch = max(replay.burned_by_epoch, key=replay.burned_by_epoch.get)
print(f"the slash shows up as a burn of "
      f"{replay.burned_by_epoch[slash_epoch]:,} at epoch {slash_epoch}")
