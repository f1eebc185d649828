import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
import mmskit.concentration as concentration
from mmskit import (
    Additive,
    ItemSet,
    NearTwo,
    SampleSpec,
    Staircase,
    Table,
    TalagrandInput,
    check_concentration,
    check_expectation_bound,
    check_expectation_lower_bound,
    check_schechtman_tail,
    check_talagrand_corollary,
    exact_value_distribution,
    make_rng,
    max_expected_distance,
    random_valuation,
    sample_subset,
    schechtman_bound,
    sparse_binomial_example,
    staircase_expectation,
    talagrand_distance,
)

# -- sampling specs -------------------------------------------------------------------


def test_sample_spec_validation():
    SampleSpec((F(0), F(1), F(1, 2)))
    with pytest.raises(ValueError):
        SampleSpec((F(3, 2),))
    assert SampleSpec.uniform(F(1, 3), 4).uniform_p() == F(1, 3)
    assert SampleSpec((F(1, 2), F(1, 3))).uniform_p() is None


def test_sample_subset_deterministic():
    spec = SampleSpec.uniform(F(1, 2), 10)
    assert sample_subset(spec, make_rng(3)) == sample_subset(spec, make_rng(3))


# -- exact distributions ---------------------------------------------------------------


def test_staircase_distribution_pinned():
    dist = exact_value_distribution(Staircase(2, 6), SampleSpec.uniform(F(1, 2), 6))
    assert dist.exact
    assert dist.median == F(2)
    assert dist.expectation == F(149, 64)


def test_near_two_distribution_pinned():
    dist = exact_value_distribution(NearTwo(3), SampleSpec.uniform(F(1, 2), 3))
    assert dict(dist.support) == {F(0): F(1, 8), F(1): F(6, 8), F(2): F(1, 8)}
    assert dist.expectation == F(1)


def test_unit_pair_distribution():
    dist = exact_value_distribution(Additive([F(1), F(1)]), SampleSpec.uniform(F(1, 2), 2))
    assert dist.expectation == F(1)
    assert dist.median == F(1)
    assert dist.max_item == F(1)


table_m4 = st.lists(
    st.integers(min_value=0, max_value=6), min_size=16, max_size=16
).map(lambda xs: [F(0)] + [F(x) for x in xs[1:]])
probs_m4 = st.lists(
    st.integers(min_value=0, max_value=8).map(lambda k: F(k, 8)),
    min_size=4,
    max_size=4,
)


@given(table_m4, probs_m4)
@settings(max_examples=50)
def test_distribution_matches_brute_force(values, probs):
    v = Table(values, validate=False)
    dist = exact_value_distribution(v, SampleSpec(tuple(probs)))
    expected = oracles.subset_distribution(v.value_of_mask, 4, probs)
    assert dict(dist.support) == expected
    assert dist.expectation == oracles.dist_expectation(expected)
    assert dist.median == oracles.dist_minimal_median(expected)


def test_symmetric_and_general_paths_agree():
    stair = Staircase(2, 6)
    spec = SampleSpec.uniform(F(1, 3), 6)
    sym = exact_value_distribution(stair, spec)
    gen = exact_value_distribution(
        Table(stair.value_table(), validate=False), spec
    )
    assert sym.expectation == gen.expectation
    assert sym.median == gen.median
    assert dict(sym.support) == dict(gen.support)


@given(table_m4, probs_m4)
@settings(max_examples=40)
def test_minimal_median_contract(values, probs):
    v = Table(values, validate=False)
    dist = exact_value_distribution(v, SampleSpec(tuple(probs)))
    below = sum((p for val, p in dist.support if val <= dist.median), F(0))
    at_or_above = sum((p for val, p in dist.support if val >= dist.median), F(0))
    assert below >= F(1, 2)
    assert at_or_above >= F(1, 2)
    for val, _ in dist.support:
        if val < dist.median:
            cdf = sum((p for w, p in dist.support if w <= val), F(0))
            assert cdf < F(1, 2)


def test_large_asymmetric_instance_rejected():
    v = Additive([F(i + 1, 7) for i in range(21)])
    with pytest.raises(ValueError):
        exact_value_distribution(v, SampleSpec.uniform(F(1, 2), 21))


# -- distance and its corollary -----------------------------------------------------


def test_distance_zero_when_x_in_every_family():
    x = ItemSet.from_indices([0, 2], 4)
    fams = [(x, ItemSet.empty(4)), (x,)]
    assert talagrand_distance(x, fams) == 0


def test_distance_single_family_is_hamming():
    x = ItemSet.from_indices([0, 1], 3)
    fam = (ItemSet.empty(3), ItemSet.from_indices([0], 3))
    assert talagrand_distance(x, [fam]) == 1


def test_distance_pinned_two_family_example():
    x = ItemSet.from_indices([0, 1], 2)
    a1 = (ItemSet.empty(2),)
    a2 = (ItemSet.from_indices([0], 2),)
    assert talagrand_distance(x, [a1, a2]) == 1


mask_sets = st.lists(
    st.integers(min_value=0, max_value=31), min_size=1, max_size=3, unique=True
)


@given(st.integers(min_value=0, max_value=31),
       st.lists(mask_sets, min_size=1, max_size=3))
@settings(max_examples=60)
def test_distance_matches_naive(x_bits, family_bits):
    fams = [tuple(ItemSet(b, 5) for b in fam) for fam in family_bits]
    expected = oracles.naive_talagrand(x_bits, family_bits, 5)
    assert talagrand_distance(ItemSet(x_bits, 5), fams) == expected


def test_corollary_single_family_uniform():
    fam = tuple(
        ItemSet(b, 3) for b in (0b000, 0b001, 0b010, 0b011)
    )  # Pr[A] = 1/2
    inp = TalagrandInput(3, tuple([F(1, 2)] * 3), (fam,))
    rep = check_talagrand_corollary(inp)
    assert rep.q == 1
    assert rep.lhs == F(1)  # q = 1 makes q^h identically 1
    assert rep.rhs == F(2)
    assert rep.holds


def test_corollary_tail_k0_is_main_weakened_by_q():
    fam1 = (ItemSet(0b01, 2), ItemSet(0b11, 2))
    fam2 = (ItemSet(0b00, 2),)
    inp = TalagrandInput(2, (F(1, 3), F(2, 3)), (fam1, fam2))
    rep = check_talagrand_corollary(inp)
    k0, _, bound0 = rep.tail[0]
    assert k0 == 0
    assert bound0 == rep.rhs / rep.q
    assert rep.holds


def test_corollary_degenerate_zero_probability_family():
    # family consisting only of a zero-probability point
    inp = TalagrandInput(
        2, (F(0), F(1, 2)), ((ItemSet(0b01, 2),), (ItemSet(0b00, 2),))
    )
    rep = check_talagrand_corollary(inp)
    assert rep.degenerate and rep.holds


def test_corollary_random_inputs_always_hold():
    rng = make_rng(2024)
    for _ in range(100):
        n = int(rng.integers(2, 7))
        q = int(rng.integers(1, 4))
        fams = []
        for _ in range(q):
            size = int(rng.integers(1, 5))
            fams.append(tuple(
                ItemSet(int(rng.integers(0, 1 << n)), n) for _ in range(size)
            ))
        probs = tuple(F(int(rng.integers(0, 9)), 8) for _ in range(n))
        rep = check_talagrand_corollary(TalagrandInput(n, probs, tuple(fams)))
        assert rep.holds


def test_corollary_rejects_oversized_universe():
    fam = (ItemSet(0, 13),)
    with pytest.raises(ValueError):
        check_talagrand_corollary(
            TalagrandInput(13, tuple([F(1, 2)] * 13), (fam,))
        )


# -- quantile tail bound ----------------------------------------------------------


def test_remark_bounds_reproduced_exactly():
    assert schechtman_bound(2, [F(1, 2), F(2, 3)], 1) == F(3, 4)
    assert schechtman_bound(3, [F(1, 2)] * 3, 1) == F(8, 9)


def test_schechtman_additive_unit_median_thresholds():
    v = Additive([F(1)] * 6)
    spec = SampleSpec.uniform(F(1, 2), 6)
    median = exact_value_distribution(v, spec).median
    assert median == F(3)
    for k in (0, 1, 2):
        rep = check_schechtman_tail(v, spec, c=[median, median], k=k, b=F(1))
        assert rep.holds
        assert not rep.degenerate


def test_schechtman_nontrivial_tail_values():
    v = Additive([F(1)] * 6)
    spec = SampleSpec.uniform(F(1, 2), 6)
    rep = check_schechtman_tail(v, spec, c=[F(2), F(2)], k=0, b=F(1))
    # Pr[X > 4] for Binomial(6, 1/2) = (6 + 1) / 64
    assert rep.lhs == F(7, 64)
    p_le_2 = F(sum(math.comb(6, j) for j in range(3)), 64)
    assert rep.rhs == F(1, 2) / (p_le_2 * p_le_2)
    assert rep.holds


def test_schechtman_zero_function_holds():
    v = Additive([F(0)] * 4)
    rep = check_schechtman_tail(
        v, SampleSpec.uniform(F(1, 2), 4), c=[F(1)], k=0, b=F(1)
    )
    assert rep.lhs == F(0)
    assert rep.holds


def test_schechtman_precondition_violations():
    spec = SampleSpec.uniform(F(1, 2), 2)
    non_monotone = Table([F(0), F(2), F(2), F(1)], validate=False)
    with pytest.raises(ValueError, match="preconditions violated"):
        check_schechtman_tail(non_monotone, spec, c=[F(1)], k=0, b=F(2))
    big_increment = Additive([F(5), F(1)])
    with pytest.raises(ValueError, match="increment"):
        check_schechtman_tail(big_increment, spec, c=[F(1)], k=0, b=F(1))


# -- worst-case E[H] ---------------------------------------------------------------


def test_max_expected_distance_pinned():
    value, witness = max_expected_distance(F(1, 2), 4)
    assert value == F(11, 8)
    assert witness == {2: F(1, 8), 3: F(3, 8)}


def test_max_expected_distance_small_budgets():
    value, witness = max_expected_distance(F(1, 2), F(5, 2))
    assert value == F(1)
    assert witness == {2: F(1, 2)}
    assert max_expected_distance(1, 4) == (F(0), {})
    assert max_expected_distance(F(1, 2), 1) == (F(0), {})
    with pytest.raises(ValueError):
        max_expected_distance(F(1, 2), F(9, 10))


def test_max_expected_distance_witness_is_feasible():
    value, witness = max_expected_distance(F(3, 16), F(7, 2))
    mass = sum(witness.values(), F(0))
    assert mass <= 1 - F(3, 16)
    budget_used = (1 - mass) + sum((1 << i) * h for i, h in witness.items())
    assert budget_used <= F(7, 2)
    assert sum(i * h for i, h in witness.items()) == value


def test_max_expected_distance_agrees_with_lp_oracle():
    rng = make_rng(77)
    for _ in range(50):
        p0 = F(int(rng.integers(1, 17)), 16)
        mass = 1 - p0
        factor = F(int(rng.integers(0, 8001)), 8)
        budget = 1 + (mass * factor if mass else F(int(rng.integers(0, 9)), 2))
        value, witness = max_expected_distance(p0, budget)
        assert value == oracles.lp_max_expected_level(p0, budget, max_level=14)
        used = (1 - sum(witness.values(), F(0))) + sum(
            (1 << i) * h for i, h in witness.items()
        )
        assert used <= budget


# -- the expectation upper bound ------------------------------------------------------


def test_single_item_bound_case():
    rep = check_expectation_bound(Additive([F(1)]), SampleSpec.uniform(F(1, 2), 1))
    assert rep.median == F(0)
    assert rep.expectation == F(1, 2)
    assert rep.bound == F(11, 8)
    assert rep.holds and rep.exact


def test_bound_on_random_monotone_subadditive_tables():
    rng = make_rng(5)
    for _ in range(30):
        m = int(rng.integers(2, 7))
        v = random_valuation(rng, "table", m)
        probs = tuple(F(int(rng.integers(0, 9)), 8) for _ in range(m))
        rep = check_expectation_bound(v, SampleSpec(probs))
        assert rep.holds and rep.exact


def test_bound_on_huge_staircase_uses_float_path():
    rep = check_expectation_bound(
        Staircase(3, 40000), SampleSpec.uniform(F(1, 2), 40000)
    )
    assert not rep.exact
    assert rep.holds
    assert rep.bound == F(3, 2) * 3 + F(11, 8)


# -- the sampling lower bound ---------------------------------------------------------


def test_lower_bound_t1_exact_equality():
    v = Additive([F(1), F(3), F(2)])
    rep = check_expectation_lower_bound(v, 1)
    assert rep.expectation == F(6)
    assert rep.bound == F(6)
    assert rep.holds and rep.partition_holds


def test_lower_bound_random_subadditive_tables():
    rng = make_rng(31)
    for _ in range(30):
        m = int(rng.integers(2, 7))
        v = random_valuation(rng, "table", m)
        t = int(rng.integers(2, 4))
        rep = check_expectation_lower_bound(v, t, rng=rng, partition_samples=10)
        assert rep.holds
        assert rep.partition_holds


def test_near_two_counterexample_for_fractional_rates():
    dist = exact_value_distribution(NearTwo(20), SampleSpec.uniform(F(3, 4), 20))
    expected = 1 - F(1, 4) ** 20 + F(3, 4) ** 20
    assert dist.expectation == expected
    # the would-be bound v(S) * p = 2 * (3/4) fails for 1/2 < p < 1
    assert dist.expectation < F(3, 2)


# -- the staircase tightness sweep ----------------------------------------------------


def test_staircase_expectation_pinned_small():
    e, median = staircase_expectation(1, 4)
    assert (e, median) == (F(5, 4), F(1))
    e2, median2 = staircase_expectation(2, 6)
    assert (e2, median2) == (F(149, 64), F(2))


def test_staircase_expectation_rejects_bad_shapes():
    with pytest.raises(ValueError):
        staircase_expectation(3, 6)
    with pytest.raises(ValueError):
        staircase_expectation(2, 7)


def test_staircase_gap_shrinks_monotonically():
    gaps = []
    for s in (400, 1600, 6400):
        e, median = staircase_expectation(3, s)
        assert median == F(3)
        gaps.append(F(9, 2) - e)
    assert gaps[0] > gaps[1] > gaps[2] > 0


def test_staircase_large_s_window():
    e, median = staircase_expectation(3, 40000)
    assert median == F(3)
    assert 4.45 <= e <= 4.50
    # exact value via big-integer accumulation: 4.482048906283793
    assert abs(e - 4.4820489063) < 1e-7


def test_staircase_float_path_matches_exact_to_12_digits(monkeypatch):
    exact_e, _ = staircase_expectation(3, 2000)
    monkeypatch.setattr(concentration, "SYMMETRIC_EXACT_LIMIT", 1999)
    float_e, _ = staircase_expectation(3, 2000)
    assert isinstance(float_e, float)
    assert abs(float_e - float(exact_e)) <= 1e-12 * float(exact_e)


# -- the sparse sampling example ------------------------------------------------------


def test_sparse_binomial_pinned():
    e, median = sparse_binomial_example(10000)
    assert e == F(839, 500)
    assert median == 1
    assert e / median < F(23, 8)


def test_sparse_binomial_small_sizes():
    e, median = sparse_binomial_example(2)
    assert e == F(839, 500)
    assert median == 2
    with pytest.raises(ValueError):
        sparse_binomial_example(1)


def test_sparse_binomial_full_rate():
    e, median = sparse_binomial_example(3, rate=3)
    assert (e, median) == (F(3), 3)


# -- the median-threshold lemma check -------------------------------------------------


def test_concentration_t1_full_inclusion():
    rep = check_concentration(
        Additive([F(1)] * 4), 1, SampleSpec.uniform(F(1), 4)
    )
    assert rep.probability == F(1)
    assert rep.mode == "exact"
    assert rep.holds


def test_concentration_binomial_46():
    v = Additive([F(1)] * 46)
    rep = check_concentration(v, 2, SampleSpec.uniform(F(1, 2), 46))
    assert rep.mode == "exact"
    assert rep.threshold == F(8)
    expected = F(sum(math.comb(46, j) for j in range(8, 47)), 1 << 46)
    assert rep.probability == expected
    assert rep.holds


def test_concentration_monte_carlo_path():
    rep = check_concentration(
        Staircase(9, 24),
        3,
        SampleSpec.uniform(F(1, 3), 24),
        trials=4000,
        mode="monte-carlo",
        rng=make_rng(8),
    )
    assert rep.mode == "monte-carlo"
    assert rep.trials == 4000
    assert rep.holds


def test_concentration_monte_carlo_deterministic():
    kwargs = dict(trials=500, mode="monte-carlo")
    a = check_concentration(
        Staircase(9, 24), 3, SampleSpec.uniform(F(1, 3), 24),
        rng=make_rng(4), **kwargs
    )
    b = check_concentration(
        Staircase(9, 24), 3, SampleSpec.uniform(F(1, 3), 24),
        rng=make_rng(4), **kwargs
    )
    assert a.probability == b.probability


def test_concentration_precondition_violations():
    v = Additive([F(1)] * 8)
    with pytest.raises(ValueError, match="inclusion probability"):
        check_concentration(v, 2, SampleSpec.uniform(F(1, 4), 8))
    # a single item above (8/(23t)) v(S)
    with pytest.raises(ValueError, match="single item"):
        check_concentration(Additive([F(1), F(1)]), 1, SampleSpec.uniform(F(1), 2))


def test_concentration_exact_mode_requires_enumerable_distribution():
    weights = [F(i % 5 + 1, 7) for i in range(18)]
    v = Additive(weights)
    spec = SampleSpec.uniform(F(1, 2), 18)
    with pytest.raises(ValueError, match="not enumerable"):
        check_concentration(v, 2, spec, mode="exact")
    rep = check_concentration(v, 2, spec, trials=800, rng=make_rng(1))
    assert rep.mode == "monte-carlo"
