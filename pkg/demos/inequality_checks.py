"""
Expectation bounds for subadditive subset sampling
===================================================

For a monotone subadditive valuation and an independently sampled subset S',
the expectation of v(S') is squeezed between v(S)/t (sampling at rate 1/t)
and (3/2) M + (11/8) b, where M is the minimal median of v(S') and b the
largest single-item value.  Both bounds are checked in exact rational
arithmetic, along with the constructions showing how tight they are.
"""

from fractions import Fraction as F

from mmskit import (
    NearTwo,
    SampleSpec,
    check_expectation_bound,
    check_expectation_lower_bound,
    exact_value_distribution,
    make_rng,
    max_expected_distance,
    random_valuation,
    sparse_binomial_example,
    staircase_expectation,
)

# The constant 11/8 is the value of a tiny linear program: maximize E[H]
# over nonnegative integer variables H with Pr[H = 0] >= 1/2 and
# E[2^H] <= 4.  The optimum splits mass between levels 2 and 3.
value, witness = max_expected_distance(F(1, 2), 4)
print(f"max E[H] = {value}, witness = {witness}")

# Upper bound on a random monotone subadditive table, exact rationals.
rng = make_rng(42)
v = random_valuation(rng, "table", 8)
rep = check_expectation_bound(v, SampleSpec.uniform(F(1, 2), 8))
print(f"\nE = {rep.expectation} <= (3/2)*{rep.median} + (11/8)*{rep.max_item} "
      f"= {rep.bound}: {rep.holds}")

# Lower bound E >= v(S)/t at sampling rate 1/t, plus a random-partition
# demonstration of the subadditivity argument behind it.
low = check_expectation_lower_bound(v, t=3, rng=rng, partition_samples=50)
print(f"E = {low.expectation} >= v(S)/3 = {low.bound}: {low.holds} "
      f"(partition average {low.partition_mean:.3f})")

# The staircase construction pushes E toward (3/2) * median from below:
# the gap at plateau 3 shrinks as the ground set grows.
for s in (400, 1600, 6400, 40000):
    e, median = staircase_expectation(3, s)
    print(f"s = {s:>6}: E = {float(e):.6f}, median = {median}, "
          f"gap to 4.5 = {4.5 - float(e):.6f}")

# Thin sampling of many unit items: the mean stays put by linearity while
# the median collapses to 1, so the mean/median ratio approaches its cap.
e, median = sparse_binomial_example(10000)
print(f"\nsparse example: E = {e} = {float(e):.3f}, median = {median}, "
      f"ratio = {float(e / median):.3f} < 23/8")

# The same machinery exposes why no integer sampling rate exists for some
# probabilities: at p = 3/4 the two-level valuation's expectation undercuts
# the would-be v(S) * p bound.
dist = exact_value_distribution(NearTwo(20), SampleSpec.uniform(F(3, 4), 20))
print(f"near-two at p = 3/4: E = {float(dist.expectation):.6f} < 1.5")
