"""Seeded random sources and an exact enumerator over the same primitives.

Every sampler in the package draws randomness only through the small set of
primitives on :class:`RandomSource`.  :func:`enumerate_law` replays a sampler
through every branch of those primitives with rational weights, which yields
the exact law of the sampler as written.  This is how the enumeration oracles
check the Monte-Carlo code paths without a second implementation.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from fractions import Fraction
from math import comb, factorial
from typing import Any, Callable, Hashable, Sequence

import numpy as np

Weight = int | float | Fraction


class NotEnumerableError(RuntimeError):
    """A sampler used a primitive that has no finite exact expansion."""


class RandomSource:
    """Deterministic stream keyed by ``(master_seed, stream_id)``.

    Streams are derived with :class:`numpy.random.SeedSequence` spawn keys, so
    trial ``i`` of an experiment draws the same numbers no matter how trials
    are scheduled.
    """

    exact = False

    def __init__(self, master_seed: int, stream_id: int | tuple[int, ...] = 0):
        key = stream_id if isinstance(stream_id, tuple) else (stream_id,)
        self.master_seed = int(master_seed)
        self.stream_id = tuple(int(k) for k in key)
        seq = np.random.SeedSequence(self.master_seed, spawn_key=self.stream_id)
        self._gen = np.random.Generator(np.random.PCG64(seq))

    def __repr__(self) -> str:
        return f"RandomSource({self.master_seed}, {self.stream_id})"

    def spawn(self, *ids: int) -> RandomSource:
        """Independent sub-stream addressed by ``ids`` (no draws consumed)."""
        return RandomSource(self.master_seed, self.stream_id + tuple(ids))

    def child(self) -> RandomSource:
        """Fresh stream seeded from this one; consumes one 64-bit draw."""
        seed = int(self._gen.integers(0, 2**63))
        return RandomSource(seed, 0)

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    # -- primitives ------------------------------------------------------

    def integers(self, n: int, size: int | None = None):
        """Uniform integer(s) in ``[0, n)``."""
        if size is None:
            return int(self._gen.integers(0, n))
        return tuple(int(v) for v in self._gen.integers(0, n, size=size))

    def categorical(self, weights: Sequence[Weight]) -> int:
        w = np.asarray([float(x) for x in weights])
        total = w.sum()
        if total <= 0:
            raise ValueError("categorical weights must have positive sum")
        u = self._gen.random() * total
        idx = int(np.searchsorted(np.cumsum(w), u, side="right"))
        # guard against u landing on the float edge of a trailing zero weight
        while idx >= len(w) or w[idx] == 0:
            idx -= 1
        return idx

    def bernoulli(self, prob: Weight) -> bool:
        return bool(self._gen.random() < float(prob))

    def multinomial(self, m: int, weights: Sequence[Weight]) -> tuple[int, ...]:
        w = np.asarray([float(x) for x in weights])
        return tuple(int(c) for c in self._gen.multinomial(m, w / w.sum()))

    def sample_indices(self, n: int, k: int) -> tuple[int, ...]:
        """Uniformly random ``k``-subset of ``range(n)``, sorted."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot choose {k} of {n}")
        if k == 0:
            return ()
        if k == n:
            return tuple(range(n))
        return tuple(sorted(int(i) for i in self._gen.choice(n, size=k, replace=False)))


class _ReplaySource:
    """Primitive-compatible source that follows a fixed prefix of branch choices."""

    exact = True

    def __init__(self, prefix: tuple[int, ...]):
        self._prefix = prefix
        self.trace: list[tuple[int, int]] = []
        self.weight = Fraction(1)

    def _pick(self, outcomes: list[tuple[Any, Fraction]]):
        pos = len(self.trace)
        idx = self._prefix[pos] if pos < len(self._prefix) else 0
        value, prob = outcomes[idx]
        self.trace.append((idx, len(outcomes)))
        self.weight *= prob
        return value

    def spawn(self, *ids: int) -> _ReplaySource:
        return self

    def child(self):
        raise NotEnumerableError("lazy structures cannot be enumerated")

    @property
    def generator(self):
        raise NotEnumerableError("raw generator access cannot be enumerated")

    def integers(self, n: int, size: int | None = None):
        if size is None:
            return self._pick([(i, Fraction(1, n)) for i in range(n)])
        return tuple(self.integers(n) for _ in range(size))

    def categorical(self, weights: Sequence[Weight]) -> int:
        w = [_exact(x) for x in weights]
        total = sum(w)
        return self._pick([(i, x / total) for i, x in enumerate(w) if x > 0])

    def bernoulli(self, prob: Weight) -> bool:
        p = _exact(prob)
        out = [(v, q) for v, q in ((False, 1 - p), (True, p)) if q > 0]
        return self._pick(out)

    def multinomial(self, m: int, weights: Sequence[Weight]) -> tuple[int, ...]:
        w = [_exact(x) for x in weights]
        total = sum(w)
        probs = [x / total for x in w]
        live = [i for i, p in enumerate(probs) if p > 0]
        outcomes = []
        for parts in _compositions(m, len(live)):
            counts = [0] * len(w)
            prob = Fraction(factorial(m))
            for i, c in zip(live, parts):
                counts[i] = c
                prob *= probs[i] ** c / factorial(c)
            outcomes.append((tuple(counts), prob))
        return self._pick(outcomes)

    def sample_indices(self, n: int, k: int) -> tuple[int, ...]:
        if not 0 <= k <= n:
            raise ValueError(f"cannot choose {k} of {n}")
        p = Fraction(1, comb(n, k))
        return self._pick([(c, p) for c in itertools.combinations(range(n), k)])


def _exact(x: Weight) -> Fraction:
    if isinstance(x, float):
        raise TypeError("exact enumeration needs int or Fraction weights, got float")
    return Fraction(x)


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_law(fn: Callable[[Any], Hashable], limit: int = 2_000_000) -> dict[Hashable, Fraction]:
    """Exact law of ``fn(source)`` over all branches of its random primitives.

    ``fn`` must draw only through the primitives; the result maps each
    distinct return value to its exact probability.  ``limit`` caps the
    number of explored leaves.
    """
    law: dict[Hashable, Fraction] = defaultdict(Fraction)
    stack: list[tuple[int, ...]] = [()]
    leaves = 0
    while stack:
        prefix = stack.pop()
        src = _ReplaySource(prefix)
        out = fn(src)
        law[out] += src.weight
        leaves += 1
        if leaves > limit:
            raise NotEnumerableError(f"more than {limit} branches")
        choices = [c for c, _ in src.trace]
        for pos in range(len(prefix), len(src.trace)):
            chosen, n_out = src.trace[pos]
            for alt in range(chosen + 1, n_out):
                stack.append(tuple(choices[:pos]) + (alt,))
    return dict(law)
