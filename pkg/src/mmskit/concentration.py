"""Concentration checks for values of randomly sampled item subsets.

Throughout, S' denotes a random subset of the m items where item e is
included independently with probability p_e, and v is a monotone subadditive
valuation.  This module verifies, exactly where enumeration is feasible:

  * the product-measure distance inequality (Talagrand):
        sum_x q^{h(x; A_1..A_q)} Pr[x]  <=  1 / prod_i Pr[A_i],
    plus its tail form Pr[h > k] <= q^(-k-1) / prod_i Pr[A_i];
  * the quantile-sum tail bound it implies for subadditive f with
    per-item increments at most b:
        Pr[f > c_1 + ... + c_q + k*b] <= q^(-k-1) / prod_i Pr[f <= c_i];
  * the expectation bound  E[v(S')] <= (3/2) M + (11/8) b,  where M is the
    minimal median of v(S') and b the largest single-item value (the 11/8
    is the worst case of E[H] for a level variable H with Pr[H=0] >= 1/2
    and E[2^H] <= 4, attained by mass 1/8 at level 2 and 3/8 at level 3);
  * the sampling lower bound  E[v(S')] >= v(S)/t  at p_e = 1/t for integer
    t, and its failure for non-integer sampling rates;
  * near-tightness of the median term via the staircase construction, and
    the gap between mean and median for sparse unit-additive sampling;
  * the median threshold bound: if every p_e >= 1/t and every single item
    is worth at most (8/(23t)) v(S), then
        Pr[v(S') >= (8/(23t)) v(S)] >= 1/2.

Probabilities and values are exact rationals on every enumerable path;
Monte Carlo paths report float frequencies with explicit 3-sigma slack.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .items import ItemSet
from .rng import make_rng
from .valuations import Staircase, Valuation, as_fraction, check_class, popcounts

SYMMETRIC_EXACT_LIMIT = 2000
GENERAL_ENUM_LIMIT = 20
TALAGRAND_POINT_LIMIT = 12
TUPLE_PRODUCT_LIMIT = 10**6


@dataclass(frozen=True)
class SampleSpec:
    """Independent per-item inclusion probabilities (exact rationals)."""

    probs: tuple[Fraction, ...]

    def __post_init__(self):
        probs = tuple(as_fraction(p) for p in self.probs)
        if any(p < 0 or p > 1 for p in probs):
            raise ValueError("inclusion probabilities must lie in [0, 1]")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, p, size: int) -> "SampleSpec":
        return cls(tuple([as_fraction(p)] * size))

    @property
    def m(self) -> int:
        return len(self.probs)

    def uniform_p(self) -> Optional[Fraction]:
        """The common inclusion probability, or None if probabilities differ."""
        if not self.probs:
            return None
        first = self.probs[0]
        return first if all(p == first for p in self.probs) else None


def sample_subset(spec: SampleSpec, rng) -> ItemSet:
    """One draw of S' (floats at the sampling boundary only)."""
    u = rng.random(spec.m)
    bits = 0
    for i, p in enumerate(spec.probs):
        if u[i] < float(p):
            bits |= 1 << i
    return ItemSet(bits, spec.m)


@dataclass(frozen=True)
class DistributionSummary:
    """Distribution of v(S'): expectation, minimal median, max item value.

    The median is the smallest support point with CDF >= 1/2; for discrete
    distributions that point automatically satisfies Pr[X >= median] >= 1/2
    as well.  `support` lists (value, probability) pairs on exact paths and
    is None when the distribution was summed in floating point.
    """

    expectation: object
    median: object
    max_item: Fraction
    support: Optional[tuple]
    exact: bool


def _point_numerators(probs: Sequence[Fraction]) -> tuple[list[int], int]:
    """Exact product-measure point masses as integers over one denominator."""
    nums = [1]
    denom = 1
    for p in probs:
        a, b = p.numerator, p.denominator
        denom *= b
        nums = [x * (b - a) for x in nums] + [x * a for x in nums]
    return nums, denom


def _binomial_weights(s: int, p: Fraction) -> list[Fraction]:
    """Exact Binomial(s, p) pmf by size."""
    if p == 0:
        return [Fraction(1)] + [Fraction(0)] * s
    if p == 1:
        return [Fraction(0)] * s + [Fraction(1)]
    q = 1 - p
    w = [q**s]
    cur = w[0]
    ratio = p / q
    for k in range(s):
        cur = cur * (s - k) * ratio / (k + 1)
        w.append(cur)
    return w


def _log_binomial_weights(s: int, p: float) -> np.ndarray:
    k = np.arange(s + 1, dtype=np.float64)
    lg = math.lgamma(s + 1)
    logc = lg - np.array([math.lgamma(x + 1) + math.lgamma(s - x + 1) for x in k])
    return logc + k * math.log(p) + (s - k) * math.log1p(-p)


def exact_value_distribution(v: Valuation, spec: SampleSpec) -> DistributionSummary:
    """Distribution of v(S') under the product measure.

    Size-symmetric valuations with a uniform inclusion probability use
    binomial weights over sizes: exact Fractions up to ground size 2000,
    log-space floats beyond (exact=False).  Everything else enumerates the
    2^m subsets exactly (m <= 20).
    """
    if spec.m != v.m:
        raise ValueError(f"arity mismatch: spec has {spec.m} items, valuation {v.m}")
    profile = v.size_profile()
    p = spec.uniform_p()
    if profile is not None and p is not None:
        if p == 0 or p == 1 or v.m <= SYMMETRIC_EXACT_LIMIT:
            weights = _binomial_weights(v.m, p)
            dist: dict = {}
            for k, w in enumerate(weights):
                if w:
                    dist[profile[k]] = dist.get(profile[k], Fraction(0)) + w
            support = tuple(sorted(dist.items()))
            expectation = sum((val * pr for val, pr in support), Fraction(0))
            cum = Fraction(0)
            median = support[-1][0]
            for val, pr in support:
                cum += pr
                if cum >= Fraction(1, 2):
                    median = val
                    break
            max_item = profile[1] if v.m >= 1 else Fraction(0)
            return DistributionSummary(expectation, median, max_item, support, True)
        # float path for huge symmetric ground sets
        logw = _log_binomial_weights(v.m, float(p))
        w = np.exp(logw)
        vals = np.array([float(x) for x in profile])
        expectation = float(math.fsum(w * vals))
        cum = 0.0
        median = profile[-1]
        for k in range(v.m + 1):
            cum += float(w[k])
            if cum >= 0.5:
                median = profile[k]
                break
        return DistributionSummary(expectation, median, profile[1], None, False)

    if v.m > GENERAL_ENUM_LIMIT:
        raise ValueError(
            f"m={v.m} exceeds the exact-enumeration limit of {GENERAL_ENUM_LIMIT} "
            "and the valuation/spec pair has no size-symmetric shortcut"
        )
    nums, denom = _point_numerators(spec.probs)
    table = v.value_table()
    acc: dict = {}
    for mask, pnum in enumerate(nums):
        if pnum:
            val = table[mask]
            acc[val] = acc.get(val, 0) + pnum
    support = tuple(sorted((val, Fraction(n, denom)) for val, n in acc.items()))
    expectation = sum((val * pr for val, pr in support), Fraction(0))
    cum = Fraction(0)
    median = support[-1][0]
    for val, pr in support:
        cum += pr
        if cum >= Fraction(1, 2):
            median = val
            break
    return DistributionSummary(expectation, median, v.max_singleton(), support, True)


# -- Talagrand-style distance inequalities --------------------------------------


def _tuple_masks(families) -> list[list[int]]:
    fams = []
    for fam in families:
        if len(fam) == 0:
            raise ValueError("every family A_i must be nonempty")
        fams.append([y.bits for y in fam])
    if not fams:
        raise ValueError("need at least one family (q >= 1)")
    product_size = 1
    for masks in fams:
        product_size *= len(masks)
        if product_size > TUPLE_PRODUCT_LIMIT:
            raise ValueError(
                f"family size product exceeds the limit of {TUPLE_PRODUCT_LIMIT}"
            )
    return fams


def talagrand_distance(x: ItemSet, families: Sequence[Sequence[ItemSet]]) -> int:
    """Controlled distance from point x to q families of points.

    h(x; A_1..A_q) = min over tuples (y^1..y^q), y^i in A_i, of
    |x \\ union(y^i)|  +  |intersection(y^i) \\ x|:
    coordinates of x no tuple member has, plus coordinates every member has
    that x lacks.  Brute force over tuples (size product capped at 1e6).
    """
    n = x.universe_size
    for fam in families:
        for y in fam:
            if y.universe_size != n:
                raise ValueError("family members must share x's universe")
    fams = _tuple_masks(families)
    full = (1 << n) - 1
    best = n + 1
    xb = x.bits
    for tup in itertools.product(*fams):
        or_y = 0
        and_y = full
        for yb in tup:
            or_y |= yb
            and_y &= yb
        mism = (xb & ~or_y) | (and_y & ~xb)
        h = mism.bit_count()
        if h < best:
            best = h
    return best


def _distance_all_points(n: int, fams: list[list[int]]) -> np.ndarray:
    """talagrand_distance for every point of {0,1}^n, vectorized over points."""
    npts = 1 << n
    x = np.arange(npts, dtype=np.int64)
    full = npts - 1
    best = np.full(npts, n + 1, dtype=np.int64)
    for tup in itertools.product(*fams):
        or_y = 0
        and_y = full
        for yb in tup:
            or_y |= yb
            and_y &= yb
        mism = (x & ~np.int64(or_y)) | (np.int64(and_y) & ~x)
        mism &= full
        np.minimum(best, popcounts(mism), out=best)
    return best


@dataclass(frozen=True)
class TalagrandInput:
    """Product measure on {0,1}^n plus q families of points."""

    universe_size: int
    probs: tuple[Fraction, ...]
    families: tuple[tuple[ItemSet, ...], ...]

    def __post_init__(self):
        probs = tuple(as_fraction(p) for p in self.probs)
        if len(probs) != self.universe_size:
            raise ValueError("need one probability per coordinate")
        if any(p < 0 or p > 1 for p in probs):
            raise ValueError("coordinate probabilities must lie in [0, 1]")
        object.__setattr__(self, "probs", probs)
        fams = tuple(tuple(fam) for fam in self.families)
        if not fams:
            raise ValueError("need at least one family (q >= 1)")
        for fam in fams:
            if not fam:
                raise ValueError("every family A_i must be nonempty")
            for y in fam:
                if y.universe_size != self.universe_size:
                    raise ValueError("family members must live in the same universe")
        object.__setattr__(self, "families", fams)

    @property
    def q(self) -> int:
        return len(self.families)


@dataclass(frozen=True)
class TalagrandReport:
    q: int
    lhs: Fraction
    rhs: Optional[Fraction]
    family_probs: tuple
    tail: tuple  # (k, Pr[h > k], bound) rows
    holds_main: bool
    holds_tail: bool
    degenerate: bool

    @property
    def holds(self) -> bool:
        return self.holds_main and self.holds_tail


def check_talagrand_corollary(inp: TalagrandInput) -> TalagrandReport:
    """Exactly verify the distance inequality and its tail form.

    Main:  sum_x q^h(x) Pr[x] <= 1 / prod_i Pr[A_i].
    Tail:  Pr[h > k] <= q^(-k-1) / prod_i Pr[A_i]  for k = 0..n.
    If some Pr[A_i] = 0 the bounds are vacuous and reported as degenerate.
    """
    n = inp.universe_size
    if n > TALAGRAND_POINT_LIMIT:
        raise ValueError(f"n={n} exceeds the exhaustive limit of {TALAGRAND_POINT_LIMIT}")
    fams = _tuple_masks(inp.families)
    nums, denom = _point_numerators(inp.probs)
    dist = _distance_all_points(n, fams)
    q = inp.q

    fam_nums = []
    for masks in fams:
        fam_nums.append(sum(nums[y] for y in set(masks)))
    family_probs = tuple(Fraction(a, denom) for a in fam_nums)

    lhs_num = 0
    for mask, pnum in enumerate(nums):
        if pnum:
            lhs_num += (q ** int(dist[mask])) * pnum
    lhs = Fraction(lhs_num, denom)

    if any(a == 0 for a in fam_nums):
        tail = tuple(
            (k, Fraction(sum(nums[m_] for m_ in range(1 << n) if dist[m_] > k), denom), None)
            for k in range(n + 1)
        )
        return TalagrandReport(
            q=q, lhs=lhs, rhs=None, family_probs=family_probs, tail=tail,
            holds_main=True, holds_tail=True, degenerate=True,
        )

    prod_anum = 1
    for a in fam_nums:
        prod_anum *= a
    rhs = Fraction(denom**q, prod_anum)
    holds_main = lhs <= rhs

    tail_rows = []
    holds_tail = True
    for k in range(n + 1):
        tail_num = sum(nums[m_] for m_ in range(1 << n) if dist[m_] > k)
        tail_lhs = Fraction(tail_num, denom)
        tail_rhs = Fraction(denom**q, (q ** (k + 1)) * prod_anum)
        ok = tail_lhs <= tail_rhs
        holds_tail = holds_tail and ok
        tail_rows.append((k, tail_lhs, tail_rhs))
    return TalagrandReport(
        q=q, lhs=lhs, rhs=rhs, family_probs=family_probs, tail=tuple(tail_rows),
        holds_main=holds_main, holds_tail=holds_tail, degenerate=False,
    )


# -- quantile-sum tail bound for subadditive f -----------------------------------


def schechtman_bound(q: int, probs: Sequence, k: int) -> Fraction:
    """The tail bound value q^(-k-1) / prod_i probs[i] (probs = Pr[f <= c_i])."""
    if q < 1 or len(probs) != q:
        raise ValueError("need exactly q probabilities with q >= 1")
    if k < 0:
        raise ValueError("k must be non-negative")
    out = Fraction(1, q ** (k + 1))
    for p in probs:
        p = as_fraction(p)
        if not 0 < p <= 1:
            raise ValueError("quantile probabilities must lie in (0, 1]")
        out /= p
    return out


@dataclass(frozen=True)
class SchechtmanReport:
    q: int
    k: int
    b: Fraction
    thresholds: tuple
    threshold_sum: Fraction
    lhs: Fraction
    quantile_probs: tuple
    rhs: Optional[Fraction]
    holds: bool
    degenerate: bool


def check_schechtman_tail(
    f: Valuation, measure: SampleSpec, c: Sequence, k: int, b
) -> SchechtmanReport:
    """Exactly verify Pr[f > sum(c) + k*b] <= q^(-k-1) / prod Pr[f <= c_i].

    Preconditions (checked): f monotone and subadditive with f(empty) = 0
    (via check_class), every per-item increment at most b, k >= 0.
    """
    n = f.m
    if n > TALAGRAND_POINT_LIMIT:
        raise ValueError(f"m={n} exceeds the exhaustive limit of {TALAGRAND_POINT_LIMIT}")
    if measure.m != n:
        raise ValueError("measure arity does not match the valuation")
    if k < 0:
        raise ValueError("k must be non-negative")
    b = as_fraction(b)
    if b <= 0:
        raise ValueError("increment bound b must be positive")
    thresholds = tuple(as_fraction(ci) for ci in c)
    q = len(thresholds)
    if q < 1:
        raise ValueError("need at least one threshold (q >= 1)")

    flags = check_class(f, include=("monotone", "subadditive"))
    if not flags.monotone or not flags.subadditive:
        raise ValueError(
            f"preconditions violated: monotone={flags.monotone}, "
            f"subadditive={flags.subadditive}"
        )
    table = f.value_table()
    if table[0] != 0:
        raise ValueError("preconditions violated: f(empty) != 0")
    for mask in range(1 << n):
        rest = ((1 << n) - 1) ^ mask
        while rest:
            low = rest & -rest
            if table[mask | low] - table[mask] > b:
                raise ValueError(
                    "preconditions violated: a per-item increment exceeds b"
                )
            rest ^= low

    nums, denom = _point_numerators(measure.probs)
    threshold_sum = sum(thresholds, Fraction(0))
    cut = threshold_sum + k * b
    lhs_num = sum(pnum for mask, pnum in enumerate(nums) if table[mask] > cut)
    lhs = Fraction(lhs_num, denom)

    quantile_nums = []
    for ci in thresholds:
        quantile_nums.append(
            sum(pnum for mask, pnum in enumerate(nums) if table[mask] <= ci)
        )
    quantile_probs = tuple(Fraction(a, denom) for a in quantile_nums)
    if any(a == 0 for a in quantile_nums):
        return SchechtmanReport(
            q=q, k=k, b=b, thresholds=thresholds, threshold_sum=threshold_sum,
            lhs=lhs, quantile_probs=quantile_probs, rhs=None, holds=True,
            degenerate=True,
        )
    rhs = schechtman_bound(q, quantile_probs, k)
    return SchechtmanReport(
        q=q, k=k, b=b, thresholds=thresholds, threshold_sum=threshold_sum,
        lhs=lhs, quantile_probs=quantile_probs, rhs=rhs, holds=lhs <= rhs,
        degenerate=False,
    )


# -- worst-case E[H] under a doubling budget -------------------------------------


def max_expected_distance(prob_zero, budget) -> tuple[Fraction, dict[int, Fraction]]:
    """Maximum of E[H] over integer-valued H >= 0 with Pr[H = 0] >= prob_zero
    and E[2^H] <= budget.

    Returns (maximum, witness) where witness maps positive levels to
    probability mass (the rest sits at level 0).  Writing mass = 1 -
    prob_zero, the budget constraint reads sum_i (2^i - 1) h_i <= budget - 1
    because slack mass at level 0 still contributes 2^0 to E[2^H].  The
    optimum uses at most two levels:

      * budget - 1 <= mass: only the budget binds, and level 1 has the best
        value-per-cost ratio i/(2^i - 1), so all of budget - 1 goes there;
      * otherwise both constraints bind and the mass splits between the two
        adjacent levels bracketing log2((budget - prob_zero) / mass).
    """
    p0 = as_fraction(prob_zero)
    budget = as_fraction(budget)
    if not 0 < p0 <= 1:
        raise ValueError("prob_zero must lie in (0, 1]")
    if budget < 1:
        raise ValueError("infeasible: E[2^H] is at least 1, so budget must be >= 1")
    mass = 1 - p0
    spend = budget - 1
    if mass == 0 or spend == 0:
        return Fraction(0), {}
    if spend <= mass:
        return spend, {1: spend}
    rest = budget - p0  # = spend + mass; both constraints tight below
    lo = 1
    while (1 << (lo + 1)) * mass <= rest:
        lo += 1
    hi = lo + 1
    h_hi = (rest - (1 << lo) * mass) / ((1 << hi) - (1 << lo))
    h_lo = mass - h_hi
    value = lo * h_lo + hi * h_hi
    witness = {}
    if h_lo:
        witness[lo] = h_lo
    if h_hi:
        witness[hi] = h_hi
    return value, witness


# -- expectation bounds -----------------------------------------------------------


@dataclass(frozen=True)
class ExpectationBoundReport:
    expectation: object
    median: object
    max_item: Fraction
    bound: object
    holds: bool
    exact: bool


def check_expectation_bound(v: Valuation, spec: SampleSpec) -> ExpectationBoundReport:
    """Verify E[v(S')] <= (3/2) * median + (11/8) * max_item.

    Exact on enumerable paths; on the float path (huge symmetric ground
    sets) the comparison is in floating point and flagged exact=False.
    """
    dist = exact_value_distribution(v, spec)
    if dist.exact:
        bound = Fraction(3, 2) * dist.median + Fraction(11, 8) * dist.max_item
        holds = dist.expectation <= bound
    else:
        bound = 1.5 * float(dist.median) + 1.375 * float(dist.max_item)
        holds = dist.expectation <= bound
    return ExpectationBoundReport(
        expectation=dist.expectation,
        median=dist.median,
        max_item=dist.max_item,
        bound=bound,
        holds=holds,
        exact=dist.exact,
    )


@dataclass(frozen=True)
class LowerBoundReport:
    expectation: Fraction
    bound: Fraction
    t: int
    holds: bool
    partition_samples: int
    partition_holds: bool
    partition_mean: float


def check_expectation_lower_bound(
    v: Valuation, t: int, rng=None, partition_samples: int = 200
) -> LowerBoundReport:
    """Verify E[v(S')] >= v(S)/t at uniform inclusion probability 1/t.

    Also runs the partition demonstration: items thrown into t parts
    uniformly at random; by subadditivity the parts of any partition sum to
    at least v(S), so the average part value is at least v(S)/t for every
    sampled partition.
    """
    if int(t) != t or t < 1:
        raise ValueError("t must be a positive integer")
    t = int(t)
    spec = SampleSpec.uniform(Fraction(1, t), v.m)
    dist = exact_value_distribution(v, spec)
    if not dist.exact:
        raise ValueError("lower-bound check needs an exact distribution")
    full = (1 << v.m) - 1
    v_all = v.value_of_mask(full)
    bound = v_all / t
    holds = dist.expectation >= bound

    if rng is None:
        rng = make_rng(0)
    partition_holds = True
    totals = []
    for _ in range(partition_samples):
        slots = rng.integers(t, size=v.m)
        masks = [0] * t
        for item in range(v.m):
            masks[int(slots[item])] |= 1 << item
        part_sum = sum((v.value_of_mask(mask) for mask in masks), Fraction(0))
        if part_sum / t < bound:
            partition_holds = False
        totals.append(part_sum / t)
    partition_mean = float(sum(totals) / len(totals)) if totals else 0.0
    return LowerBoundReport(
        expectation=dist.expectation,
        bound=bound,
        t=t,
        holds=holds,
        partition_samples=partition_samples,
        partition_holds=partition_holds,
        partition_mean=partition_mean,
    )


def staircase_expectation(plateau: int, ground_size: int) -> tuple:
    """(E[v(S')], median) for the staircase valuation at p = 1/2.

    The median equals the plateau height exactly: v(S') <= plateau iff
    |S'| <= s/2, which has probability > 1/2 by binomial symmetry, while
    Pr[|S'| <= plateau - 1] < 1/2 since plateau < s/2.  The expectation is
    exact (Fractions) up to s = 2000 and a log-space float beyond; it
    approaches (3/2) * plateau from below as s grows.
    """
    stair = Staircase(plateau, ground_size)
    profile = stair.size_profile()
    s = ground_size
    if s <= SYMMETRIC_EXACT_LIMIT:
        total = 0
        comb = 1  # C(s, 0)
        for k in range(s + 1):
            total += comb * profile[k].numerator
            comb = comb * (s - k) // (k + 1)
        return Fraction(total, 1 << s), Fraction(plateau)
    logw = _log_binomial_weights(s, 0.5)
    vals = np.array([float(x) for x in profile])
    expectation = float(math.fsum(np.exp(logw) * vals))
    return expectation, Fraction(plateau)


def sparse_binomial_example(size: int, rate=Fraction(839, 500)) -> tuple:
    """(E, median) for a unit-additive valuation sampled at p = rate/size.

    The sum |S'| is Binomial(size, rate/size): its mean is exactly `rate`
    while its median stays at a small integer, so the mean/median ratio can
    approach the worst case allowed by the expectation bound.  The median is
    found by exact accumulation of the binomial CDF.
    """
    size = int(size)
    if size < 2:
        raise ValueError("size must be at least 2")
    rate = as_fraction(rate)
    p = rate / size
    if not 0 < p <= 1:
        raise ValueError("rate/size must lie in (0, 1]")
    expectation = rate  # size * p exactly
    if p == 1:
        return expectation, size
    q = 1 - p
    term = q**size
    cum = term
    k = 0
    half = Fraction(1, 2)
    while cum < half:
        term = term * (size - k) * p / ((k + 1) * q)
        k += 1
        cum += term
    return expectation, k


# -- the median threshold bound ----------------------------------------------------


@dataclass(frozen=True)
class ConcentrationReport:
    probability: object
    threshold: Fraction
    mode: str
    holds: bool
    trials: Optional[int]
    slack: float


def check_concentration(
    v: Valuation,
    t: int,
    spec: SampleSpec,
    trials: int = 10000,
    mode: str = "auto",
    rng=None,
) -> ConcentrationReport:
    """Check Pr[v(S') >= (8/(23t)) v(S)] >= 1/2.

    Preconditions (checked exactly): every inclusion probability >= 1/t and
    every single item worth at most (8/(23t)) v(S).  Uses the exact
    distribution when enumerable, otherwise a seeded Monte Carlo run with
    3-sigma slack on the 1/2 target.
    """
    if int(t) != t or t < 1:
        raise ValueError("t must be a positive integer")
    t = int(t)
    if spec.m != v.m:
        raise ValueError("spec arity does not match the valuation")
    one_over_t = Fraction(1, t)
    if any(p < one_over_t for p in spec.probs):
        raise ValueError("preconditions violated: some inclusion probability < 1/t")
    full = (1 << v.m) - 1
    v_all = v.value_of_mask(full)
    threshold = Fraction(8, 23 * t) * v_all
    for e in range(v.m):
        if v.value_of_mask(1 << e) > threshold:
            raise ValueError(
                "preconditions violated: a single item exceeds (8/(23t)) v(S)"
            )

    if mode not in ("auto", "exact", "monte-carlo"):
        raise ValueError(f"unknown mode {mode!r}")
    enumerable = (
        v.size_profile() is not None
        and spec.uniform_p() is not None
        and v.m <= SYMMETRIC_EXACT_LIMIT
    ) or v.m <= 16
    if mode == "exact" and not enumerable:
        raise ValueError("exact mode requested but the distribution is not enumerable")
    use_exact = enumerable if mode == "auto" else (mode == "exact")

    if use_exact:
        dist = exact_value_distribution(v, spec)
        prob = sum(
            (pr for val, pr in dist.support if val >= threshold), Fraction(0)
        )
        return ConcentrationReport(
            probability=prob,
            threshold=threshold,
            mode="exact",
            holds=prob >= Fraction(1, 2),
            trials=None,
            slack=0.0,
        )
    if rng is None:
        rng = make_rng(0)
    hits = 0
    for _ in range(trials):
        s_prime = sample_subset(spec, rng)
        if v.value_of_mask(s_prime.bits) >= threshold:
            hits += 1
    freq = hits / trials
    slack = 3.0 * math.sqrt(0.25 / trials)
    return ConcentrationReport(
        probability=freq,
        threshold=threshold,
        mode="monte-carlo",
        holds=freq >= 0.5 - slack,
        trials=trials,
        slack=slack,
    )
