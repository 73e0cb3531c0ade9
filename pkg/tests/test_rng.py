from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import pytest

from cgsim.rng import NotEnumerableError, RandomSource, enumerate_law


def test_same_seed_and_stream_repeat():
    a = RandomSource(7, (1, 2))
    b = RandomSource(7, (1, 2))
    assert [a.integers(1000) for _ in range(20)] == [b.integers(1000) for _ in range(20)]


def test_streams_differ():
    a = RandomSource(7, 1).integers(10**9, size=5)
    b = RandomSource(7, 2).integers(10**9, size=5)
    assert a != b


def test_spawn_consumes_nothing():
    a = RandomSource(3)
    a.spawn(5)
    assert a.integers(10**9) == RandomSource(3).integers(10**9)
    assert a.spawn(1, 2).integers(10**9) == RandomSource(3, (0, 1, 2)).integers(10**9)


def test_draws_do_not_depend_on_thread_count():
    def draw(t):
        return RandomSource(11, (0, t)).multinomial(50, [1, 2, 3])

    serial = [draw(t) for t in range(64)]
    with ThreadPoolExecutor(max_workers=4) as pool:
        threaded = list(pool.map(draw, range(64)))
    assert serial == threaded


def test_sample_indices_is_sorted_subset():
    idx = RandomSource(1).sample_indices(10, 4)
    assert len(set(idx)) == 4 and list(idx) == sorted(idx) and all(0 <= i < 10 for i in idx)


def test_enumerate_uniform_integers():
    law = enumerate_law(lambda src: src.integers(3))
    assert law == {0: Fraction(1, 3), 1: Fraction(1, 3), 2: Fraction(1, 3)}


def test_enumerate_sample_indices():
    law = enumerate_law(lambda src: src.sample_indices(4, 2))
    assert len(law) == 6 and set(law.values()) == {Fraction(1, 6)}


def test_enumerate_multinomial_matches_formula():
    law = enumerate_law(lambda src: src.multinomial(3, [1, 1, 2]))
    # 3!/(1!1!1!) * (1/4)(1/4)(1/2)
    assert law[(1, 1, 1)] == Fraction(6, 32)
    assert law[(0, 0, 3)] == Fraction(1, 8)
    assert sum(law.values()) == 1


def test_enumerate_composed_draws():
    def two_step(src):
        first = src.bernoulli(Fraction(1, 3))
        return first, src.integers(2) if first else None

    law = enumerate_law(two_step)
    assert law == {(False, None): Fraction(2, 3), (True, 0): Fraction(1, 6), (True, 1): Fraction(1, 6)}


def test_enumerate_rejects_float_weights():
    with pytest.raises(TypeError):
        enumerate_law(lambda src: src.categorical([0.5, 0.5]))


def test_enumerate_rejects_child_streams():
    with pytest.raises(NotEnumerableError):
        enumerate_law(lambda src: src.child())


def test_categorical_skips_zero_weights():
    src = RandomSource(5)
    assert {src.categorical([0, 3, 0, 1, 0]) for _ in range(200)} <= {1, 3}
