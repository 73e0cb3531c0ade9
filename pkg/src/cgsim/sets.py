"""Finite subsets of the naturals used as indicator identities.

The canonical encoding of a finite set ``B`` is ``sum(2**x for x in B)``, an
exact bijection with the naturals.  Several representations share it:

* :class:`FiniteSet` -- explicit members, for small sets and exact work;
* :class:`IntervalSet` -- ``{lo, ..., hi}``, for large base sets;
* :class:`ArraySet` -- a large explicit set held as a sorted array;
* :class:`LazySubset` -- a uniformly random subset of a base set whose members
  are revealed on demand and materialised only when a question cannot be
  answered from what has been revealed so far.

Equality, ordering and hashing are by membership, never by representation.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable

import numpy as np

from .rng import RandomSource

# bases at most this large are sampled eagerly (and can be enumerated)
EAGER_LIMIT = 4096


class SetId:
    """Abstract finite subset of the naturals."""

    size: int

    def __len__(self) -> int:
        return self.size

    def __contains__(self, x: int) -> bool:
        raise NotImplementedError

    def members(self) -> np.ndarray:
        """Sorted int64 array of all members."""
        raise NotImplementedError

    def draw(self, rng, n: int) -> tuple[int, ...]:
        """``n`` independent uniform draws from the set."""
        raise NotImplementedError

    def draw_excluding(self, rng, excluded: set[int], n: int) -> tuple[int, ...]:
        """Uniform ``n``-subset of ``self`` minus ``excluded`` (without replacement)."""
        pool = [int(v) for v in self.members() if int(v) not in excluded]
        return tuple(pool[i] for i in rng.sample_indices(len(pool), n))

    @property
    def code(self) -> int:
        """Canonical encoding ``sum(2**x)``."""
        arr = self.members()
        if len(arr) == 0:
            return 0
        bits = np.zeros(int(arr[-1]) + 1, dtype=bool)
        bits[arr] = True
        return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")

    def is_small(self) -> bool:
        return self.size <= EAGER_LIMIT

    # structural facts that avoid materialising; None means "unknown"
    def _known_subset_of(self, other: SetId) -> bool | None:
        return None

    def intersection_size(self, other: SetId) -> int:
        if self is other:
            return self.size
        for a, b in ((self, other), (other, self)):
            if a._known_subset_of(b):
                return a.size
        for a, b in ((self, other), (other, self)):
            if isinstance(b, IntervalSet):
                arr = a.members()
                return int(np.searchsorted(arr, b.hi, side="right") - np.searchsorted(arr, b.lo))
        for a, b in ((self, other), (other, self)):
            bitmap = _bitmap_of(a)
            if bitmap is not None:
                arr = b.members()
                arr = arr[arr < len(bitmap)]
                return int(np.count_nonzero(bitmap[arr]))
        a, b = self.members(), other.members()
        if len(a) > len(b):
            a, b = b, a
        # both arrays are sorted and duplicate-free
        i = np.minimum(np.searchsorted(b, a), len(b) - 1)
        return int(np.count_nonzero(b[i] == a))

    def issubset(self, other: SetId) -> bool:
        if self.size > other.size:
            return False
        known = self._known_subset_of(other)
        if known is not None:
            return known
        return self.intersection_size(other) == self.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, SetId):
            return NotImplemented
        if self is other:
            return True
        if self.size != other.size:
            return False
        if self.size == 0:
            return True
        witness = _inequality_witness(self, other)
        if witness is not None:
            return witness
        a, b = self.members(), other.members()
        mid = len(a) // 2
        if a[0] != b[0] or a[-1] != b[-1] or a[mid] != b[mid]:
            return False
        return bool(np.array_equal(a, b))

    def __hash__(self) -> int:
        # only the size is free for every representation; equal sets share it
        return hash(("SetId", self.size))

    def __lt__(self, other: SetId) -> bool:
        return compare_sets(self, other) < 0

    def __le__(self, other: SetId) -> bool:
        return compare_sets(self, other) <= 0

    def __gt__(self, other: SetId) -> bool:
        return compare_sets(self, other) > 0

    def __ge__(self, other: SetId) -> bool:
        return compare_sets(self, other) >= 0


class FiniteSet(SetId):

    def __init__(self, elements: Iterable[int]):
        elems = frozenset(int(x) for x in elements)
        if any(x < 0 for x in elems):
            raise ValueError("set members must be natural numbers")
        self.elements = elems
        self.size = len(elems)

    def __repr__(self) -> str:
        if self.size <= 12:
            return f"FiniteSet({sorted(self.elements)})"
        return f"FiniteSet(<{self.size} members>)"

    def __contains__(self, x) -> bool:
        return x in self.elements

    @cached_property
    def _sorted(self) -> tuple[int, ...]:
        return tuple(sorted(self.elements))

    def members(self) -> np.ndarray:
        return np.asarray(self._sorted, dtype=np.int64)

    def draw(self, rng, n: int) -> tuple[int, ...]:
        items = self._sorted
        return tuple(items[i] for i in rng.integers(len(items), size=n))

    def draw_excluding(self, rng, excluded, n):
        pool = [x for x in self._sorted if x not in excluded]
        return tuple(pool[i] for i in rng.sample_indices(len(pool), n))

    @cached_property
    def code(self) -> int:
        return sum(1 << x for x in self.elements)

    def _known_subset_of(self, other):
        if isinstance(other, FiniteSet):
            return self.elements <= other.elements
        if isinstance(other, IntervalSet):
            return all(x in other for x in self.elements)
        return None

    def __eq__(self, other):
        if isinstance(other, FiniteSet):
            return self.elements == other.elements
        return SetId.__eq__(self, other)

    __hash__ = SetId.__hash__


class IntervalSet(SetId):
    """The integers ``lo..hi`` inclusive."""

    def __init__(self, lo: int, hi: int):
        if lo < 0 or hi < lo:
            raise ValueError(f"bad interval [{lo}, {hi}]")
        self.lo, self.hi = int(lo), int(hi)
        self.size = self.hi - self.lo + 1

    def __repr__(self) -> str:
        return f"IntervalSet({self.lo}, {self.hi})"

    def __contains__(self, x) -> bool:
        return isinstance(x, (int, np.integer)) and self.lo <= x <= self.hi

    def members(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1, dtype=np.int64)

    def draw(self, rng, n: int) -> tuple[int, ...]:
        if n == 0:
            return ()
        return tuple(self.lo + v for v in rng.integers(self.size, size=n))

    def draw_excluding(self, rng, excluded, n):
        if self.is_small() or rng.exact:
            return SetId.draw_excluding(self, rng, excluded, n)
        # rejection; the excluded part is tiny next to the interval
        out: list[int] = []
        taken = set(excluded)
        while len(out) < n:
            x = self.lo + rng.integers(self.size)
            if x not in taken:
                taken.add(x)
                out.append(x)
        return tuple(out)

    @cached_property
    def code(self) -> int:
        return (1 << (self.hi + 1)) - (1 << self.lo)

    def _known_subset_of(self, other):
        if isinstance(other, IntervalSet):
            return other.lo <= self.lo and self.hi <= other.hi
        return None

    def __eq__(self, other):
        if isinstance(other, IntervalSet):
            return (self.lo, self.hi) == (other.lo, other.hi)
        return SetId.__eq__(self, other)

    __hash__ = SetId.__hash__


class ArraySet(SetId):
    """Explicit large set backed by a sorted numpy array."""

    def __init__(self, sorted_members: np.ndarray):
        self._arr = np.asarray(sorted_members, dtype=np.int64)
        self.size = len(self._arr)

    def __repr__(self) -> str:
        return f"ArraySet(<{self.size} members>)"

    def __contains__(self, x) -> bool:
        i = np.searchsorted(self._arr, x)
        return bool(i < self.size and self._arr[i] == x)

    def contains_many(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        i = np.minimum(np.searchsorted(self._arr, xs), self.size - 1)
        return self._arr[i] == xs

    def members(self) -> np.ndarray:
        return self._arr

    def draw(self, rng, n: int) -> tuple[int, ...]:
        return tuple(int(self._arr[i]) for i in rng.integers(self.size, size=n)) if n else ()

    @cached_property
    def code(self) -> int:
        return SetId.code.fget(self)

    def build_bitmap(self) -> ArraySet:
        """Cache a membership bitmap; worthwhile for long-lived sets of a few 1e5 members."""
        bitmap = np.zeros(int(self._arr[-1]) + 1 if self.size else 0, dtype=bool)
        bitmap[self._arr] = True
        self._bitmap = bitmap
        return self

    def _known_subset_of(self, other):
        if isinstance(other, IntervalSet):
            return self.size == 0 or (other.lo <= self._arr[0] and self._arr[-1] <= other.hi)
        return None

    __hash__ = SetId.__hash__


def _bitmap_of(s: SetId) -> np.ndarray | None:
    """Membership bitmap, kept only for large explicit sets that are compared repeatedly."""
    return getattr(s, "_bitmap", None)


class LazySubset(SetId):
    """Uniformly random ``size``-subset of ``base``, revealed on demand.

    The state records members known to be in (``revealed``) and out
    (``excluded``).  Each query samples from the exact conditional law of a
    uniform ``size``-subset given that state, so any sequence of queries sees
    the same distribution as if the whole subset had been drawn up front.
    The subset owns its random stream; its value is fixed by the seed and the
    order of queries.
    """

    def __init__(self, base: SetId, size: int, rng: RandomSource,
                 revealed: Iterable[int] = ()):
        revealed = list(dict.fromkeys(int(x) for x in revealed))
        if size > base.size or len(revealed) > size:
            raise ValueError("subset larger than its base")
        if any(x not in base for x in revealed):
            raise ValueError("revealed members must lie in the base")
        self.base = base
        self.size = int(size)
        self._rng = rng
        self._revealed: list[int] = revealed
        self._in: set[int] = set(revealed)
        self._out: set[int] = set()
        self._materialised: ArraySet | None = None

    def __repr__(self) -> str:
        state = "materialised" if self._materialised is not None else f"{len(self._in)} revealed"
        return f"LazySubset({self.size} of {self.base!r}, {state})"

    @property
    def revealed(self) -> frozenset[int]:
        return frozenset(self._in)

    @property
    def materialised(self) -> bool:
        return self._materialised is not None

    def __contains__(self, x) -> bool:
        if self._materialised is not None:
            return x in self._materialised
        x = int(x)
        if x in self._in:
            return True
        if x in self._out or x not in self.base:
            return False
        unknown_slots = self.size - len(self._in)
        pool = self.base.size - len(self._in) - len(self._out)
        if self._rng.generator.random() * pool < unknown_slots:
            self._in.add(x)
            self._revealed.append(x)
            return True
        self._out.add(x)
        return False

    def draw(self, rng, n: int) -> tuple[int, ...]:
        # ``rng`` is ignored: draws must stay consistent with this subset's own state
        if self._materialised is not None:
            return self._materialised.draw(self._rng, n)
        out = []
        for u in self._rng.generator.random(n):
            pos = u * self.size
            if pos < len(self._revealed):
                # given the branch, pos is uniform on [0, #revealed)
                out.append(self._revealed[int(pos)])
            else:
                x = self._fresh_unknown()
                self._in.add(x)
                self._revealed.append(x)
                out.append(x)
        return tuple(out)

    def _fresh_unknown(self) -> int:
        base = self.base
        if isinstance(base, IntervalSet) and not base.is_small():
            gen = self._rng.generator
            while True:
                x = base.lo + int(gen.integers(base.size))
                if x not in self._in and x not in self._out:
                    return x
        return base.draw_excluding(self._rng, self._in | self._out, 1)[0]

    def members(self) -> np.ndarray:
        return self.materialise().members()

    def materialise(self) -> ArraySet:
        if self._materialised is None:
            need = self.size - len(self._in)
            known = np.asarray(sorted(self._in), dtype=np.int64)
            if need == 0:
                arr = known
            else:
                extra = _uniform_subset_avoiding(self.base, self._in | self._out, need, self._rng)
                arr = np.union1d(known, extra)
            self._materialised = ArraySet(arr)
        return self._materialised

    @cached_property
    def code(self) -> int:
        return self.materialise().code

    def _known_subset_of(self, other):
        if other is self.base:
            return True
        known = self.base._known_subset_of(other) if self.base is not other else True
        if known:
            return True
        return None

    __hash__ = SetId.__hash__


def _uniform_subset_avoiding(base: SetId, avoid: set[int], n: int, rng: RandomSource) -> np.ndarray:
    """Uniform ``n``-subset of ``base`` minus ``avoid`` as a sorted array."""
    gen = rng.generator
    avoid_arr = np.asarray(sorted(avoid), dtype=np.int64)
    if not isinstance(base, IntervalSet) or base.size - len(avoid) < 4 * n:
        pool = np.setdiff1d(base.members(), avoid_arr, assume_unique=True)
        return np.sort(gen.choice(pool, size=n, replace=False))
    draws = max(int(n * 1.05) + 64, n + len(avoid_arr) + 64)
    while True:
        cand = np.unique(gen.integers(base.lo, base.hi + 1, size=draws))
        if len(avoid_arr):
            pos = np.minimum(np.searchsorted(cand, avoid_arr), len(cand) - 1)
            cand = np.delete(cand, pos[cand[pos] == avoid_arr])
        if len(cand) >= n:
            # the distinct values of i.i.d. draws form a uniform random subset
            # given their count; dropping a uniform surplus keeps it uniform
            drop = gen.choice(len(cand), size=len(cand) - n, replace=False, shuffle=False)
            return np.delete(cand, drop)
        draws = int(draws * 1.5)


def _inequality_witness(a: SetId, b: SetId) -> bool | None:
    """``False`` if a revealed member of one lazy set is missing from the other."""
    for x_set, y_set in ((a, b), (b, a)):
        if isinstance(x_set, LazySubset) and x_set._materialised is None:
            for x in list(x_set._revealed):
                if x not in y_set:
                    return False
        elif isinstance(x_set, FiniteSet) and x_set.size <= 64 and not isinstance(y_set, FiniteSet):
            for x in x_set.elements:
                if x not in y_set:
                    return False
    return None


def compare_sets(a: SetId, b: SetId) -> int:
    """Order by canonical encoding: -1, 0 or 1."""
    if a is b:
        return 0
    if isinstance(a, (FiniteSet, IntervalSet)) and isinstance(b, (FiniteSet, IntervalSet)) \
            and a.size <= EAGER_LIMIT and b.size <= EAGER_LIMIT:
        ca, cb = a.code, b.code
        return (ca > cb) - (ca < cb)
    # a proper subset always has the smaller encoding
    if a.size < b.size and a._known_subset_of(b):
        return -1
    if b.size < a.size and b._known_subset_of(a):
        return 1
    diff = np.setxor1d(a.members(), b.members(), assume_unique=True)
    if len(diff) == 0:
        return 0
    top = int(diff[-1])
    return -1 if top in b else 1


def as_setid(value) -> SetId:
    if isinstance(value, SetId):
        return value
    if isinstance(value, range) and value.step == 1 and len(value) > 0:
        return IntervalSet(value.start, value.stop - 1)
    return FiniteSet(value)


def encode_set(elements: Iterable[int]) -> int:
    return as_setid(elements).code


def decode_set(code: int) -> SetId:
    """Inverse of the canonical encoding; contiguous runs become intervals."""
    if code < 0:
        raise ValueError("set codes are natural numbers")
    if code == 0:
        return FiniteSet(())
    lo = (code & -code).bit_length() - 1
    hi = code.bit_length() - 1
    if code == (1 << (hi + 1)) - (1 << lo) and hi - lo + 1 > EAGER_LIMIT:
        return IntervalSet(lo, hi)
    nbytes = (code.bit_length() + 7) // 8
    bits = np.unpackbits(np.frombuffer(code.to_bytes(nbytes, "little"), dtype=np.uint8),
                         bitorder="little")
    members = np.flatnonzero(bits)
    if len(members) <= EAGER_LIMIT:
        return FiniteSet(int(x) for x in members)
    return ArraySet(members.astype(np.int64))
