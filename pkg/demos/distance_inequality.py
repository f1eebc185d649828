"""
Convex-distance style inequalities on the Boolean cube
=======================================================

The distance h(x; A_1..A_q) counts how many coordinates of x stay uncovered
after picking one representative point from each family A_i.  Two exact
inequalities control it under any product measure: a moment-sum form and a
geometric tail.  Both are verified here by full enumeration of the cube.
"""

from fractions import Fraction as F

from mmskit import (
    Additive,
    ItemSet,
    SampleSpec,
    TalagrandInput,
    check_schechtman_tail,
    check_talagrand_corollary,
    make_rng,
    talagrand_distance,
)

# A hand-checkable case on two coordinates: x = {0,1} against the families
# A_1 = {empty} and A_2 = {{0}}.  The union of representatives covers item 0
# at best, so exactly one coordinate of x stays uncovered.
x = ItemSet.from_indices([0, 1], 2)
fams = ((ItemSet.empty(2),), (ItemSet.from_indices([0], 2),))
print(f"h(x; A_1, A_2) = {talagrand_distance(x, fams)}")

# The same families under the uniform measure: the inequality compares the
# q^h moment against 1 / (Pr[A_1] * Pr[A_2]), and each tail Pr[h > k]
# against q^(-k-1) times that product bound.
inp = TalagrandInput(2, (F(1, 2), F(1, 2)), fams)
rep = check_talagrand_corollary(inp)
print(f"sum form: {rep.lhs} <= {rep.rhs} ({rep.holds_main})")
for k, tail_lhs, tail_rhs in rep.tail:
    print(f"  tail k={k}: Pr[h > {k}] = {tail_lhs} <= {tail_rhs}")

# A seeded random sweep over larger cubes; the report flags families of
# probability zero as degenerate (the bound is vacuous there).
rng = make_rng(2)
violations = 0
for _ in range(200):
    n = int(rng.integers(2, 9))
    q = int(rng.integers(1, 4))
    families = tuple(
        tuple(ItemSet(int(rng.integers(0, 1 << n)), n)
              for _ in range(int(rng.integers(1, 6))))
        for _ in range(q)
    )
    probs = tuple(F(int(rng.integers(0, 17)), 16) for _ in range(n))
    out = check_talagrand_corollary(TalagrandInput(n, probs, families))
    violations += not out.holds
print(f"\nrandom sweep: {violations} violations in 200 cases")

# The quantile-sum tail for a subadditive function: with both thresholds at
# the median of a six-item unit-additive sum, the bound holds exhaustively.
v = Additive([F(1)] * 6)
spec = SampleSpec.uniform(F(1, 2), 6)
for k in (0, 1, 2):
    tail = check_schechtman_tail(v, spec, c=[F(3), F(3)], k=k, b=F(1))
    print(f"Pr[f > {tail.threshold_sum} + {k}] = {tail.lhs} <= {tail.rhs}")
