"""
Fractional relaxation, rounding, and contention resolution
===========================================================

When no single item clears the preassignment threshold, the pipeline builds
a fractional relaxation from each agent's witness partitions, samples one
bundle per agent in each copy, and resolves cross-copy contention uniformly.
Twenty identical items between two agents with a single rounding copy keep
every step visible.
"""

from fractions import Fraction as F

from mmskit import (
    Additive,
    Agent,
    AlgoParams,
    Instance,
    allocate_prepared,
    check_feasible,
    prepare,
    run_trials,
)

inst = Instance(20, (
    Agent("a0", Additive([F(1)] * 20)),
    Agent("a1", Additive([F(1)] * 20)),
))

# With one copy the threshold is 4/23 of a share; each 1/10 singleton sits
# below it, so both agents survive preprocessing and reach the relaxation.
params = AlgoParams.for_instance(inst.n, seed=11, copies=1)
prep = prepare(inst, params)
print(f"threshold = {params.threshold}, surviving agents = {prep.reduced.n}")

# The relaxation places each agent's witness bundles at weight 1/n; item and
# agent totals are exactly one, verified in rational arithmetic.
sol = prep.solution
print(f"fractional entries = {len(sol.entries)}, violations = {check_feasible(sol)}")
for agent_idx, bundle, weight in sol.entries:
    print(f"  agent {agent_idx} takes {bundle.members()} at weight {weight}")

# One draw of the full pipeline: bundles are disjoint and anything dropped
# by contention resolution lands in the pool.
alloc = allocate_prepared(prep, seed=23)
for agent_id, bundle in sorted(alloc.bundles.items()):
    print(f"{agent_id}: {len(bundle.members())} items, "
          f"ratio = {alloc.diagnostics.ratios[agent_id]}")
print(f"pool size = {len(alloc.pool.members())}")

# Across many seeded trials, the monitor tracks how often an agent's copy-1
# bundle is worth at least half her rescaled share (the rounding contract).
stats = run_trials(inst, params, trials=500, instance_id="unit-2x20")
print(f"\ncopy-1 half-share frequency (worst agent) = {stats.lemma1_monitor():.3f}")
print(f"full-success rate at the 1/14 target = {stats.full_success_rate():.3f}")
