from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cgsim.cg import CgParams, make_distribution
from cgsim.domain import (
    CONST_ELEMENT, DELETED_ELEMENT, FiniteDistribution, ModeMismatchError, Sample, budget_count,
    ceil_count, choose, indicator, odd, partition, sample_iid, tv_exact,
)
from cgsim.rng import RandomSource, enumerate_law
from cgsim.sets import FiniteSet

A, B, C, D = (odd(x, 5) for x in (1, 2, 3, 4))

elements = st.sampled_from([CONST_ELEMENT, A, B, C, D, indicator(FiniteSet([1, 2]), 6)])
samples = st.lists(elements, max_size=10).map(Sample)


def dist_strategy(support=(A, B, C, D)):
    return st.lists(st.integers(0, 5), min_size=len(support), max_size=len(support)).filter(
        lambda ws: sum(ws) > 0).map(lambda ws: FiniteDistribution(
            {e: Fraction(w, sum(ws)) for e, w in zip(support, ws)}))


def test_union_and_difference_respect_multiplicities():
    left = Sample([A, B, B, C])
    right = Sample([A, B, D, D])
    assert left + right == Sample([A, A, B, B, B, C, D, D])
    assert left - right == Sample([B, C])


@given(samples, samples)
def test_multiset_identities(x, y):
    assert (x + y).size == x.size + y.size
    assert (x + y) - y == x
    assert (x - y).issubset(x)
    assert x.issubset(x + y)
    for e in (x + y).distinct():
        assert (x - y).count(e) == max(0, x.count(e) - y.count(e))


def test_tv_examples():
    p = FiniteDistribution({A: Fraction(1, 2), B: Fraction(1, 2)})
    assert tv_exact(p, p) == 0
    assert tv_exact(FiniteDistribution.point_mass(A), FiniteDistribution.point_mass(B)) == 1
    big = make_distribution(CgParams(FiniteSet([1, 2, 3, 4]), 2, 4))
    small = make_distribution(CgParams(FiniteSet([1, 2]), 2, 4))
    # constants agree; odds 1,2: |1/16 - 1/8| each; odds 3,4: 1/16 each; indicators 1/4 each
    assert tv_exact(big, small) == Fraction(3, 8)


def test_tv_refuses_mixed_modes():
    p = FiniteDistribution({A: Fraction(1)})
    with pytest.raises(ModeMismatchError):
        tv_exact(p, p.as_float())


@given(dist_strategy(), dist_strategy(), dist_strategy())
def test_tv_is_a_metric(p, q, r):
    assert tv_exact(p, q) == tv_exact(q, p)
    assert 0 <= tv_exact(p, q) <= 1
    assert tv_exact(p, r) <= tv_exact(p, q) + tv_exact(q, r)


def test_distribution_validation():
    with pytest.raises(ValueError):
        FiniteDistribution({A: Fraction(1, 2)})
    with pytest.raises(ValueError):
        FiniteDistribution({A: 0.5, B: 0.4}, exact=False)
    FiniteDistribution({A: 0.5, B: 0.5 - 1e-13}, exact=False)


def test_sample_iid_small_cases():
    rng = RandomSource(0)
    assert sample_iid(FiniteDistribution.point_mass(A), 3, rng) == Sample([A, A, A])
    assert sample_iid(FiniteDistribution.point_mass(A), 0, rng).size == 0


def test_sample_iid_frequency():
    p = FiniteDistribution.uniform([A, B])
    S = sample_iid(p, 100_000, RandomSource(42))
    assert abs(S.count(A) / 100_000 - 0.5) <= 0.01


def test_sample_iid_chi_square():
    p = FiniteDistribution({A: Fraction(1, 2), B: Fraction(1, 4), C: Fraction(1, 8), D: Fraction(1, 8)})
    n = 100_000
    S = sample_iid(p, n, RandomSource(9))
    chi2 = sum((S.count(e) - n * float(v)) ** 2 / (n * float(v)) for e, v in p.mass.items())
    # 3 degrees of freedom; 16.27 is the 0.999 quantile
    assert chi2 < 16.27


def test_sample_iid_reproducible():
    p = FiniteDistribution.uniform([A, B, C])
    assert sample_iid(p, 500, RandomSource(1, 4)) == sample_iid(p, 500, RandomSource(1, 4))


def test_partition_examples():
    ind = indicator(FiniteSet([0, 1]), 6)
    consts, odds, inds = partition(Sample([CONST_ELEMENT, CONST_ELEMENT, odd(7, 5), ind]))
    assert consts == Sample([CONST_ELEMENT] * 2) and odds == Sample([odd(7, 5)]) and inds == Sample([ind])
    assert all(part.size == 0 for part in partition(Sample()))
    high = indicator(FiniteSet([0, 2]), 8)
    assert partition(Sample([high]))[2] == Sample([high])
    with pytest.raises(ValueError):
        partition(Sample([DELETED_ELEMENT]))


def test_element_invariants():
    with pytest.raises(ValueError):
        odd(3, 6)
    with pytest.raises(ValueError):
        indicator(FiniteSet([1]), 5)


def test_choose_edges():
    S = Sample([A, A, B])
    assert choose(S, 3, RandomSource(0)) == S
    assert choose(S, 0, RandomSource(0)).size == 0
    with pytest.raises(ValueError):
        choose(S, 4, RandomSource(0))


def test_choose_law_on_repeated_elements():
    law = enumerate_law(lambda src: choose(Sample([A, A, B]), 2, src))
    assert law == {Sample([A, A]): Fraction(1, 3), Sample([A, B]): Fraction(2, 3)}


@pytest.mark.parametrize("size,n", [(3, 1), (4, 2), (5, 3), (6, 4)])
def test_choose_is_exchangeable(size, n):
    labelled = [odd(x, 5) for x in range(size)]
    law = enumerate_law(lambda src: choose(Sample(labelled), n, src))
    for e in labelled:
        assert sum(w for out, w in law.items() if e in out) == Fraction(n, size)


def test_budget_counts_use_decimal_reading():
    assert budget_count(0.29, 100) == 29
    assert budget_count(0.25, 5) == 1
    assert budget_count(Fraction(1, 3), 3) == 1
    assert ceil_count(0.25, 10) == 3


def test_json_roundtrip_is_deterministic():
    ind = indicator(FiniteSet([1, 2]), 6)
    S = Sample([ind, A, CONST_ELEMENT, A])
    text = S.dumps()
    assert text == Sample([A, CONST_ELEMENT, A, ind]).dumps()
    assert Sample.from_json(json.loads(text)) == S
    p = make_distribution(CgParams(FiniteSet([1, 2]), 2, 4))
    assert FiniteDistribution.from_json(p.to_json()).mass == p.mass
    assert json.loads(text)["counts"][0][0] == {"kind": "const", "x": 0, "level": 0}
