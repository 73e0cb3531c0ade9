from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cgsim.rng import RandomSource
from cgsim.sets import (
    ArraySet, FiniteSet, IntervalSet, LazySubset, compare_sets, decode_set, encode_set,
)

small_sets = st.frozensets(st.integers(0, 40), max_size=12)


def test_encoding_is_sum_of_powers():
    assert encode_set({0, 2}) == 5
    assert encode_set(()) == 0
    assert IntervalSet(1, 3).code == 14 == FiniteSet({1, 2, 3}).code


def test_equality_ignores_representation():
    assert IntervalSet(2, 5) == FiniteSet([5, 4, 3, 2])
    assert ArraySet(np.array([1, 2, 3])) == IntervalSet(1, 3)
    assert FiniteSet([1, 2]) != FiniteSet([1, 3])
    assert hash(IntervalSet(2, 5)) == hash(FiniteSet([2, 3, 4, 5]))


@given(small_sets)
def test_decode_inverts_encode(s):
    assert decode_set(encode_set(s)) == FiniteSet(s)


@given(small_sets, small_sets)
def test_order_follows_encoding(a, b):
    sa, sb = FiniteSet(a), FiniteSet(b)
    ca, cb = sa.code, sb.code
    assert compare_sets(sa, sb) == (ca > cb) - (ca < cb)


def test_large_interval_decodes_to_interval():
    s = decode_set(IntervalSet(10, 9000).code)
    assert isinstance(s, IntervalSet) and (s.lo, s.hi) == (10, 9000)


@given(small_sets, small_sets)
def test_intersection_size_matches_python_sets(a, b):
    assert FiniteSet(a).intersection_size(FiniteSet(b)) == len(a & b)
    arr = ArraySet(np.array(sorted(a), dtype=np.int64))
    assert arr.intersection_size(IntervalSet(5, 20)) == len([x for x in a if 5 <= x <= 20])


def test_lazy_subset_membership_rate():
    base = IntervalSet(0, 4999)
    hits = sum(LazySubset(base, 2500, RandomSource(1, i)).__contains__(17) for i in range(4000))
    # each point is in a uniform half-size subset with probability 1/2
    assert abs(hits / 4000 - 0.5) < 3 * np.sqrt(0.25 / 4000)


def test_lazy_subset_conditional_membership():
    # given one member revealed, another point is in with probability (s-1)/(N-1)
    base = IntervalSet(0, 4999)
    n, hits = 4000, 0
    for i in range(n):
        lazy = LazySubset(base, 1000, RandomSource(2, i), revealed=[3])
        hits += 4 in lazy
    expected = 999 / 4999
    assert abs(hits / n - expected) < 4 * np.sqrt(expected * (1 - expected) / n)


def test_lazy_subset_materialises_consistently():
    base = IntervalSet(0, 99_999)
    lazy = LazySubset(base, 5000, RandomSource(3), revealed=[10, 20])
    drawn = lazy.draw(None, 50)
    arr = lazy.members()
    assert len(arr) == 5000 and len(np.unique(arr)) == 5000
    assert all(x in lazy for x in drawn) and 10 in lazy and 20 in lazy
    assert lazy.issubset(base)


def test_lazy_draws_are_uniform_over_the_subset():
    base = IntervalSet(0, 9_999)
    lazy = LazySubset(base, 5000, RandomSource(4))
    draws = np.array(lazy.draw(None, 20000))
    members = lazy.members()
    assert np.isin(draws, members).all()
    # every draw hits a fixed half of the subset with probability 1/2
    half = set(members[:2500].tolist())
    frac = np.mean([d in half for d in draws])
    assert abs(frac - 0.5) < 4 * np.sqrt(0.25 / 20000)


def test_lazy_equality_without_materialising():
    base = IntervalSet(0, 10**6)
    a = LazySubset(base, 1000, RandomSource(5))
    b = LazySubset(base, 1000, RandomSource(6))
    a.draw(None, 5)
    assert a != b
    assert not a.materialised
    assert a == a


def test_lazy_rejects_bad_sizes():
    with pytest.raises(ValueError):
        LazySubset(FiniteSet([1, 2]), 3, RandomSource(0))
    with pytest.raises(ValueError):
        LazySubset(FiniteSet([1, 2]), 1, RandomSource(0), revealed=[1, 2])
