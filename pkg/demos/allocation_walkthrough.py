"""
Maximin shares and the randomized allocation pipeline
======================================================

Build a six-item instance for two agents, compute each agent's exact
maximin share with its witness partition, then run the full randomized
pipeline and inspect who got what.
"""

from fractions import Fraction as F

from mmskit import Additive, Agent, AlgoParams, Instance, Xos, allocate, exact_mms

# Alice values item 0 highly and the rest evenly; Bob's valuation is the
# pointwise maximum of two additive clauses (an XOS function).
alice = Additive([F(3, 8), F(1, 8), F(1, 8), F(1, 8), F(1, 8), F(1, 8)])
bob = Xos([
    [F(1, 2), F(1, 2), F(0), F(0), F(0), F(0)],
    [F(0), F(0), F(1, 4), F(1, 4), F(1, 4), F(1, 4)],
])
inst = Instance(6, (Agent("alice", alice), Agent("bob", bob)))

# The maximin share is the best worst-bundle value each agent could lock in
# by splitting all six items into two bundles and keeping the worse one.
for agent in inst.agents:
    res = exact_mms(agent.valuation, inst.m, inst.n)
    bundles = [part.members() for part in res.partition]
    print(f"{agent.id}: MMS = {res.value}, witness partition = {bundles}")

# The pipeline picks the number of rounding copies from n, preassigns any
# item worth more than 4/(23t) of a share, and rounds the rest.
params = AlgoParams.for_instance(inst.n, seed=7)
print(f"\ncopies t = {params.copies}, preassignment threshold = {params.threshold}")

alloc = allocate(inst, params)
for agent_id, bundle in sorted(alloc.bundles.items()):
    ratio = alloc.diagnostics.ratios[agent_id]
    print(f"{agent_id}: items {bundle.members()}, ratio to MMS = {ratio} = {float(ratio):.3f}")
print(f"unallocated pool: {alloc.pool.members()}")
