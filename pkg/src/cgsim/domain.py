"""Domain elements, multiset samples and finite distributions over N x N."""

from __future__ import annotations

import json
import math
from collections import Counter
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple

from .sets import as_setid, decode_set

CONST = "const"
ODD = "odd"
INDICATOR = "indicator"
DELETED = "deleted"
_KIND_RANK = {CONST: 0, ODD: 1, INDICATOR: 2, DELETED: 3}


class DomainElement(NamedTuple):
    """A point of the domain, tagged by the part of the distribution it comes from.

    ``x`` is a natural number for constants and odds and a :class:`SetId` for
    indicators.  The deleted mark carries no data.
    """

    kind: str
    x: object
    level: int

    def __repr__(self) -> str:
        if self.kind == DELETED:
            return "⊥"
        if self.kind == INDICATOR:
            return f"I({self.x!r}, {self.level})"
        return f"({self.x}, {self.level})"


def const() -> DomainElement:
    return CONST_ELEMENT


def odd(x: int, level: int) -> DomainElement:
    if level % 2 != 1:
        raise ValueError(f"odd elements need an odd level, got {level}")
    if x < 0:
        raise ValueError("odd values are natural numbers")
    return DomainElement(ODD, int(x), int(level))


def indicator(setid, level: int) -> DomainElement:
    if level % 2 != 0 or level < 2:
        raise ValueError(f"indicator level must be even and at least 2, got {level}")
    return DomainElement(INDICATOR, as_setid(setid), int(level))


CONST_ELEMENT = DomainElement(CONST, 0, 0)
DELETED_ELEMENT = DomainElement(DELETED, None, -1)


def element_sort_key(e: DomainElement):
    if e.kind == INDICATOR:
        return (_KIND_RANK[e.kind], e.level, e.x.code)
    return (_KIND_RANK[e.kind], e.level, e.x if e.x is not None else -1)


def element_to_json(e: DomainElement) -> dict:
    if e.kind == INDICATOR:
        code = e.x.code
        x = code if code < 2**53 else hex(code)
    else:
        x = e.x
    return {"kind": e.kind, "x": x, "level": e.level}


def element_from_json(d: dict) -> DomainElement:
    kind = d["kind"]
    if kind == CONST:
        return CONST_ELEMENT
    if kind == DELETED:
        return DELETED_ELEMENT
    if kind == ODD:
        return odd(d["x"], d["level"])
    if kind == INDICATOR:
        x = d["x"]
        code = int(x, 16) if isinstance(x, str) else int(x)
        return indicator(decode_set(code), d["level"])
    raise ValueError(f"unknown element kind {kind!r}")


class Sample:
    """Immutable multiset of domain elements.

    ``+`` is the multiset union (multiplicities add) and ``-`` the multiset
    difference (multiplicities subtract, floored at zero).
    """

    __slots__ = ("_counts", "size", "_hash")

    def __init__(self, items: Iterable[DomainElement] | dict | None = None):
        if items is None:
            counts: dict = {}
        elif isinstance(items, dict):
            counts = {e: int(c) for e, c in items.items() if c > 0}
            if any(c < 0 for c in items.values()):
                raise ValueError("multiplicities must be non-negative")
        else:
            counts = dict(Counter(items))
        self._counts = counts
        self.size = sum(counts.values())
        self._hash = None

    @classmethod
    def _raw(cls, counts: dict) -> Sample:
        obj = cls.__new__(cls)
        obj._counts = counts
        obj.size = sum(counts.values())
        obj._hash = None
        return obj

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[DomainElement]:
        for e, c in self._counts.items():
            for _ in range(c):
                yield e

    def items(self):
        return self._counts.items()

    def distinct(self):
        return self._counts.keys()

    def count(self, e: DomainElement) -> int:
        return self._counts.get(e, 0)

    def __contains__(self, e) -> bool:
        return e in self._counts

    def __add__(self, other: Sample) -> Sample:
        out = dict(self._counts)
        for e, c in other._counts.items():
            out[e] = out.get(e, 0) + c
        return Sample._raw(out)

    def __sub__(self, other: Sample) -> Sample:
        out = {}
        for e, c in self._counts.items():
            left = c - other._counts.get(e, 0)
            if left > 0:
                out[e] = left
        return Sample._raw(out)

    def issubset(self, other: Sample) -> bool:
        return all(other._counts.get(e, 0) >= c for e, c in self._counts.items())

    __le__ = issubset

    def __eq__(self, other) -> bool:
        if not isinstance(other, Sample):
            return NotImplemented
        return self.size == other.size and self._counts == other._counts

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._counts.items()))
        return self._hash

    def __repr__(self) -> str:
        parts = [repr(e) if c == 1 else f"{e!r}x{c}" for e, c in self._sorted_items()]
        return "{" + ", ".join(parts) + "}"

    def _sorted_items(self):
        return sorted(self._counts.items(), key=lambda ec: element_sort_key(ec[0]))

    def of_kind(self, kind: str) -> Sample:
        return Sample._raw({e: c for e, c in self._counts.items() if e.kind == kind})

    def count_kind(self, kind: str) -> int:
        return sum(c for e, c in self._counts.items() if e.kind == kind)

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "counts": [[element_to_json(e), c] for e, c in self._sorted_items()],
        }

    @classmethod
    def from_json(cls, d: dict) -> Sample:
        return cls({element_from_json(e): c for e, c in d["counts"]})

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


EMPTY = Sample()


def partition(S: Sample) -> tuple[Sample, Sample, Sample]:
    """Split ``S`` into (constants, odds, indicators)."""
    parts: tuple[dict, dict, dict] = ({}, {}, {})
    for e, c in S.items():
        if e.kind == CONST:
            parts[0][e] = c
        elif e.kind == ODD:
            parts[1][e] = c
        elif e.kind == INDICATOR:
            parts[2][e] = c
        else:
            raise ValueError("partition is undefined for samples containing deleted marks")
    return Sample._raw(parts[0]), Sample._raw(parts[1]), Sample._raw(parts[2])


def noind(S: Sample) -> Sample:
    return Sample._raw({e: c for e, c in S.items() if e.kind != INDICATOR})


def choose(S: Sample, n: int, rng) -> Sample:
    """Uniformly random size-``n`` sub-multiset, chosen over labeled copies."""
    if n < 0 or n > S.size:
        raise ValueError(f"cannot choose {n} elements from a sample of size {S.size}")
    if n == S.size:
        return S
    if n == 0:
        return EMPTY
    labels = list(S)
    return Sample(labels[i] for i in rng.sample_indices(len(labels), n))


def _as_fraction(eta) -> Fraction:
    if isinstance(eta, float):
        # decimal reading, so that e.g. 0.29 * 100 counts 29 rather than 28
        return Fraction(repr(eta))
    return Fraction(eta)


def budget_count(eta, m: int) -> int:
    """Manipulated count under the fixed-budget convention: ``floor(eta * m)``."""
    return math.floor(_as_fraction(eta) * m)


def ceil_count(eta, m: int) -> int:
    return math.ceil(_as_fraction(eta) * m)


class ModeMismatchError(TypeError):
    """Exact and float distributions were mixed without an explicit cast."""


class FiniteDistribution:
    """Sparse distribution over domain elements.

    In exact mode every mass is a :class:`~fractions.Fraction` and the total is
    exactly one; in float mode the total is one within 1e-12.
    """

    def __init__(self, mass: dict, exact: bool | None = None):
        if exact is None:
            exact = all(isinstance(v, (int, Fraction)) for v in mass.values())
        if exact:
            clean = {e: Fraction(v) for e, v in mass.items() if v != 0}
            if any(isinstance(v, float) for v in mass.values()):
                raise ModeMismatchError("float mass given to an exact distribution")
        else:
            clean = {e: float(v) for e, v in mass.items() if v != 0}
        for e, v in clean.items():
            if not 0 <= v <= 1:
                raise ValueError(f"mass {v} of {e!r} outside [0, 1]")
        total = sum(clean.values())
        if exact and total != 1:
            raise ValueError(f"masses sum to {total}, not 1")
        if not exact and abs(total - 1) > 1e-12:
            raise ValueError(f"masses sum to {total!r}, not 1 within 1e-12")
        self.mass = clean
        self.exact = exact

    def __repr__(self) -> str:
        mode = "exact" if self.exact else "float"
        return f"FiniteDistribution({len(self.mass)} atoms, {mode})"

    def __getitem__(self, e) -> Fraction | float:
        return self.mass.get(e, Fraction(0) if self.exact else 0.0)

    def prob(self, e):
        return self[e]

    def support(self) -> list[DomainElement]:
        return sorted(self.mass, key=element_sort_key)

    def as_float(self) -> FiniteDistribution:
        return FiniteDistribution({e: float(v) for e, v in self.mass.items()}, exact=False)

    def as_exact(self) -> FiniteDistribution:
        return FiniteDistribution({e: Fraction(v) for e, v in self.mass.items()}, exact=True)

    def sample_iid(self, m: int, rng) -> Sample:
        return sample_iid(self, m, rng)

    def to_json(self) -> dict:
        rows = []
        for e in self.support():
            v = self.mass[e]
            rows.append([element_to_json(e), str(v) if self.exact else v])
        return {"exact": self.exact, "mass": rows}

    @classmethod
    def from_json(cls, d: dict) -> FiniteDistribution:
        exact = d["exact"]
        conv = Fraction if exact else float
        return cls({element_from_json(e): conv(v) for e, v in d["mass"]}, exact=exact)

    @classmethod
    def point_mass(cls, e: DomainElement, exact: bool = True) -> FiniteDistribution:
        return cls({e: Fraction(1) if exact else 1.0}, exact=exact)

    @classmethod
    def uniform(cls, elements: Iterable[DomainElement], exact: bool = True) -> FiniteDistribution:
        elems = list(dict.fromkeys(elements))
        w = Fraction(1, len(elems)) if exact else 1.0 / len(elems)
        if not exact:
            # keep the float total within tolerance for any support size
            return cls({e: w for e in elems}, exact=False)
        return cls({e: w for e in elems}, exact=True)

    @classmethod
    def empirical(cls, S: Sample, exact: bool = True) -> FiniteDistribution:
        if S.size == 0:
            raise ValueError("the empirical distribution of an empty sample is undefined")
        if exact:
            return cls({e: Fraction(c, S.size) for e, c in S.items()}, exact=True)
        return cls({e: c / S.size for e, c in S.items()}, exact=False)


def tv_exact(p: FiniteDistribution, q: FiniteDistribution):
    """Total-variation distance, half the L1 distance over the union of supports."""
    if p.exact != q.exact:
        raise ModeMismatchError("cannot mix exact and float distributions; cast one first")
    zero = Fraction(0) if p.exact else 0.0
    total = zero
    for e in p.mass.keys() | q.mass.keys():
        total += abs(p.mass.get(e, zero) - q.mass.get(e, zero))
    return total / 2


def sample_iid(p: FiniteDistribution, m: int, rng) -> Sample:
    """``m`` independent draws from ``p``."""
    if m < 0:
        raise ValueError("sample size must be non-negative")
    if m == 0:
        return EMPTY
    support = p.support()
    counts = rng.multinomial(m, [p.mass[e] for e in support])
    return Sample._raw({e: c for e, c in zip(support, counts) if c})
