"""The class of indicator distributions and its parameter planners.

A member ``p_{B,j,k}`` puts mass ``1 - 1/j`` on the constant point (0, 0),
spreads ``1/j - 1/k`` uniformly over the odd points ``(x, 2j+1)`` for
``x in B``, and puts ``1/k`` on the indicator ``(enc(B), 2j+2)`` that names
the whole distribution.  The class for a function ``g`` is the set of members
with ``k = g(j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from typing import Callable

from .domain import (
    CONST, CONST_ELEMENT, INDICATOR, ODD, DomainElement, FiniteDistribution, Sample,
    indicator, odd,
)
from .sets import (
    EAGER_LIMIT, FiniteSet, IntervalSet, LazySubset, SetId, as_setid, decode_set,
)

# above this many points a member is kept structured rather than tabulated
TABULATE_LIMIT = 1 << 16


@dataclass(frozen=True, eq=False)
class CgParams:
    B: SetId
    j: int
    k: int

    def __post_init__(self):
        object.__setattr__(self, "B", as_setid(self.B))
        if self.j < 2:
            raise ValueError(f"j must be at least 2, got {self.j}")
        if self.k <= self.j:
            raise ValueError(f"need 1/j - 1/k > 0, got j={self.j}, k={self.k}")
        if self.B.size == 0:
            raise ValueError("B must be nonempty")

    def __eq__(self, other) -> bool:
        if not isinstance(other, CgParams):
            return NotImplemented
        return (self.j, self.k) == (other.j, other.k) and self.B == other.B

    def __hash__(self) -> int:
        return hash((self.j, self.k, self.B))

    @property
    def odd_level(self) -> int:
        return 2 * self.j + 1

    @property
    def indicator_level(self) -> int:
        return 2 * self.j + 2

    @property
    def indicator(self) -> DomainElement:
        return indicator(self.B, self.indicator_level)

    @cached_property
    def _exact_weights(self):
        return 1 - Fraction(1, self.j), Fraction(1, self.j) - Fraction(1, self.k), Fraction(1, self.k)

    @cached_property
    def _per_odd(self) -> Fraction:
        return self._exact_weights[1] / self.B.size

    def weights(self, exact: bool = True):
        """(constant, all odds together, indicator) masses."""
        if exact:
            return self._exact_weights
        return 1 - 1 / self.j, 1 / self.j - 1 / self.k, 1 / self.k

    def mass(self, e: DomainElement, exact: bool = True):
        c, w, i = self.weights(exact)
        zero = Fraction(0) if exact else 0.0
        if e.kind == CONST:
            return c
        if e.kind == ODD:
            if e.level == self.odd_level and e.x in self.B:
                return self._per_odd if exact else w / self.B.size
            return zero
        if e.kind == INDICATOR:
            if e.level == self.indicator_level and e.x == self.B:
                return i
            return zero
        return zero

    def sample(self, m: int, rng) -> Sample:
        """``m`` i.i.d. draws, generated as category counts then odd values."""
        if m == 0:
            return Sample()
        c, w, i = self.weights(exact=rng.exact)
        n_const, n_odd, n_ind = rng.multinomial(m, [c, w, i])
        counts: dict = {}
        if n_const:
            counts[CONST_ELEMENT] = n_const
        level = self.odd_level
        for x in self.B.draw(rng, n_odd):
            e = DomainElement(ODD, x, level)
            counts[e] = counts.get(e, 0) + 1
        if n_ind:
            counts[self.indicator] = n_ind
        return Sample._raw(counts)

    def sample_nonindicators(self, n: int, rng) -> Sample:
        """``n`` i.i.d. draws from the member conditioned on not being the indicator."""
        if n == 0:
            return Sample()
        # constant : odd = (1 - 1/j) : (1/j - 1/k) = k(j - 1) : (k - j)
        weights = [self.k * (self.j - 1), self.k - self.j]
        n_const, n_odd = rng.multinomial(n, weights)
        counts: dict = {}
        if n_const:
            counts[CONST_ELEMENT] = n_const
        for x in self.B.draw(rng, n_odd):
            e = DomainElement(ODD, x, self.odd_level)
            counts[e] = counts.get(e, 0) + 1
        return Sample._raw(counts)

    def to_json(self) -> dict:
        B = self.B
        if isinstance(B, IntervalSet):
            bj = {"interval": [B.lo, B.hi]}
        else:
            bj = {"members": [int(x) for x in B.members()]}
        return {"B": bj, "j": self.j, "k": self.k}

    @classmethod
    def from_json(cls, d: dict) -> CgParams:
        return cls(set_from_json(d["B"]), d["j"], d["k"])

    def __repr__(self) -> str:
        return f"CgParams(B={self.B!r}, j={self.j}, k={self.k})"


def set_from_json(d) -> SetId:
    if isinstance(d, list):
        return FiniteSet(d)
    if "interval" in d:
        lo, hi = d["interval"]
        return IntervalSet(lo, hi)
    if "members" in d:
        return FiniteSet(d["members"])
    if "code" in d:
        c = d["code"]
        return decode_set(int(c, 16) if isinstance(c, str) else int(c))
    raise ValueError(f"cannot read a set from {d!r}")


def make_distribution(params: CgParams, exact: bool = True) -> FiniteDistribution:
    """Tabulate ``p_{B,j,k}``; only for sets small enough to list."""
    if params.B.size > TABULATE_LIMIT:
        raise ValueError(f"|B|={params.B.size} is too large to tabulate")
    c, w, i = params.weights(exact)
    per_odd = w / params.B.size
    mass = {CONST_ELEMENT: c}
    for x in params.B.members():
        mass[odd(int(x), params.odd_level)] = per_odd
    mass[params.indicator] = i
    return FiniteDistribution(mass, exact=exact)


def cg_tv(a: CgParams, b: CgParams, exact: bool = True):
    """Closed-form total variation between two members, via ``|A ∩ B|``."""
    ca, wa, ia = a.weights(exact)
    cb, wb, ib = b.weights(exact)
    total = abs(ca - cb)
    if a.j == b.j:
        na, nb = a.B.size, b.B.size
        inter = a.B.intersection_size(b.B)
        total += inter * abs(wa / na - wb / nb) + (na - inter) * (wa / na) + (nb - inter) * (wb / nb)
    else:
        total += wa + wb
    if a.indicator_level == b.indicator_level and a.B == b.B:
        total += abs(ia - ib)
    else:
        total += ia + ib
    return total / 2


def distance(a, b, exact: bool = True):
    """Total variation between any two of: member params, finite distributions."""
    if isinstance(a, CgParams) and isinstance(b, CgParams):
        return cg_tv(a, b, exact)
    if isinstance(a, FiniteDistribution) and isinstance(b, FiniteDistribution):
        from .domain import tv_exact
        if a.exact != b.exact:
            a, b = (a.as_exact(), b.as_exact()) if exact else (a.as_float(), b.as_float())
        return tv_exact(a, b)
    if isinstance(a, CgParams):
        a, b = b, a
    if not (isinstance(a, FiniteDistribution) and isinstance(b, CgParams)):
        raise TypeError(f"cannot compare {type(a).__name__} with {type(b).__name__}")
    # TV = 1 - sum_x min(a(x), b(x)); the sum only runs over a's support
    overlap = Fraction(0) if exact else 0.0
    for e, v in a.mass.items():
        pv = b.mass(e, exact)
        overlap += min(v if exact else float(v), pv)
    return 1 - overlap


def tv_lower_bound(j: int, k: int) -> Fraction:
    """``(1/j - 1/k) / 2``: the separation of any member from its half-size restrictions."""
    if not k > j >= 2:
        raise ValueError(f"need k > j >= 2, got j={j}, k={k}")
    return (Fraction(1, j) - Fraction(1, k)) / 2


@dataclass(frozen=True)
class GFunction:
    """Closed-form ``g``: ``square`` (j^2), ``scaled-square`` (ceil(c j^2)) or ``power`` (j^e)."""

    rule: str = "square"
    c: Fraction = Fraction(1)
    e: int = 2

    def __post_init__(self):
        if self.rule not in ("square", "scaled-square", "power"):
            raise ValueError(f"unknown g rule {self.rule!r}")
        object.__setattr__(self, "c", Fraction(self.c))
        if self.c <= 0:
            raise ValueError("scale must be positive")
        if self.rule == "power" and self.e < 2:
            raise ValueError("power rule needs an exponent of at least 2")

    def __call__(self, j: int) -> int:
        if self.rule == "square":
            return j * j
        if self.rule == "scaled-square":
            return math.ceil(self.c * j * j)
        return j ** self.e

    def is_superlinear_on(self, grid) -> bool:
        vals = [(j, self(j)) for j in sorted(grid)]
        mono = all(g1 <= g2 for (_, g1), (_, g2) in zip(vals, vals[1:]))
        ratio = all(Fraction(g1, j1) < Fraction(g2, j2) for (j1, g1), (j2, g2) in zip(vals, vals[1:]))
        return mono and ratio

    def to_json(self) -> dict:
        d: dict = {"rule": self.rule}
        if self.rule == "scaled-square":
            d["c"] = str(self.c)
        if self.rule == "power":
            d["e"] = self.e
        return d

    @classmethod
    def from_json(cls, d) -> GFunction:
        if isinstance(d, str):
            return cls(d)
        return cls(d.get("rule", "square"), Fraction(d.get("c", 1)), int(d.get("e", 2)))


@dataclass(frozen=True)
class MetaQ:
    """Uniform meta-distribution over members restricted to size-``s`` subsets of ``base.B``."""

    base: CgParams
    subset_size: int

    def __post_init__(self):
        if not 1 <= self.subset_size <= self.base.B.size:
            raise ValueError(f"subset size {self.subset_size} not in [1, {self.base.B.size}]")

    @property
    def s(self) -> int:
        return self.subset_size

    def n_members(self) -> int:
        return math.comb(self.base.B.size, self.subset_size)

    def members(self):
        """All members with equal weight; only for tiny bases."""
        import itertools

        base = [int(x) for x in self.base.B.members()]
        for combo in itertools.combinations(base, self.subset_size):
            yield CgParams(FiniteSet(combo), self.base.j, self.base.k)

    def to_json(self) -> dict:
        return {"base": self.base.to_json(), "s": self.subset_size}

    @classmethod
    def from_json(cls, d: dict) -> MetaQ:
        return cls(CgParams.from_json(d["base"]), d["s"])


def sample_q(Q: MetaQ, rng) -> CgParams:
    """Draw ``q ~ Q``: a member on a uniformly random size-``s`` subset of the base."""
    B, s = Q.base.B, Q.subset_size
    if s == B.size:
        return Q.base
    if rng.exact or B.size <= EAGER_LIMIT:
        members = B.members()
        picked = FiniteSet(int(members[i]) for i in rng.sample_indices(B.size, s))
        return CgParams(picked, Q.base.j, Q.base.k)
    return CgParams(LazySubset(B, s, rng.child()), Q.base.j, Q.base.k)


@dataclass
class PlannerOutput:
    alpha: Fraction
    j: int
    k: int
    eta: Fraction
    gamma_prime: Fraction
    gamma: Fraction
    m: int
    n_required: int
    birthday: float
    markov: Fraction
    separation: Fraction
    separation_ok: bool
    zeta_ub: float
    zeta_ok: bool

    def to_json(self) -> dict:
        out = {}
        for key, v in self.__dict__.items():
            out[key] = str(v) if isinstance(v, Fraction) else v
        out["eta_float"] = float(self.eta)
        out["gamma_prime_float"] = float(self.gamma_prime)
        out["gamma_float"] = float(self.gamma)
        return out


def n_required(m: int) -> int:
    """Smallest subset size whose birthday term at sample size ``m`` is at most 1/32."""
    if m <= 0:
        return 1
    denom = -math.expm1(math.log(31 / 32) / m)
    n = math.ceil(m / denom)
    # the float ratio can land a hair off an integer; settle it exactly
    from .stats import birthday_bound
    while n > m and birthday_bound(m, n - 1, exact=True) <= Fraction(1, 32):
        n -= 1
    while birthday_bound(m, n, exact=True) > Fraction(1, 32):
        n += 1
    return n


def plan_parameters(alpha, g: GFunction, m: int, cap: int = 10**6) -> PlannerOutput:
    """Choose ``j, eta, gamma'`` and the subset size so the confusion argument goes through."""
    from .stats import birthday_bound, markov_indicator_bound

    alpha = Fraction(alpha)
    if alpha < 1:
        raise ValueError("alpha must be at least 1")
    j = next((j for j in range(2, cap + 1) if g(j) >= 1024 * alpha * j), None)
    if j is None:
        raise ValueError(f"no j <= {cap} with g(j) >= 1024*alpha*j; g is not superlinear enough")
    k = g(j)
    eta = Fraction(32, k)
    gamma_prime = alpha / k
    gamma = 4 * alpha * eta + 4 * gamma_prime
    n = n_required(m)
    birthday = birthday_bound(m, n) if m <= n else 1.0
    markov = markov_indicator_bound(k, eta, exact=True)
    separation = tv_lower_bound(j, k)
    zeta = min(1.0, 2 * birthday + float(markov))
    return PlannerOutput(alpha, j, k, eta, gamma_prime, gamma, m, n, birthday, markov,
                         separation, separation >= gamma, zeta, zeta <= 1 / 8)


@dataclass(frozen=True)
class RobustnessProfile:
    """Increasing error profile ``f`` with ``f(0) = 0``, given with its exact inverse.

    ``linear``: f = c*eta; ``sqrt``: f = eta^(1/2); ``root``: f = eta^(1/r).
    """

    rule: str = "linear"
    c: Fraction = Fraction(1)
    r: int = 2

    def __post_init__(self):
        if self.rule not in ("linear", "sqrt", "root"):
            raise ValueError(f"unknown profile {self.rule!r}")
        object.__setattr__(self, "c", Fraction(self.c))
        if self.c <= 0 or self.r < 1:
            raise ValueError("profile is not invertible on (0, 1]")

    def __call__(self, eta) -> float:
        if self.rule == "linear":
            return float(self.c * Fraction(eta))
        r = 2 if self.rule == "sqrt" else self.r
        return float(eta) ** (1 / r)

    def inverse(self, y: Fraction) -> Fraction:
        """Exact ``f^{-1}(y)``; ``f(eta) < y`` iff ``eta < inverse(y)``."""
        y = Fraction(y)
        if self.rule == "linear":
            return y / self.c
        r = 2 if self.rule == "sqrt" else self.r
        return y ** r


def plan_parameters_f(f: RobustnessProfile, j: int) -> tuple[float, int]:
    """``(eta_j, g_min(j))``: the largest float ``eta`` with ``f(eta) < 1/(16j)``
    and the smallest admissible ``g(j)`` for it."""
    if j < 1:
        raise ValueError("j must be positive")
    target = f.inverse(Fraction(1, 16 * j))
    if target <= 0:
        raise ValueError("profile is not invertible on (0, 1]")
    eta = min(float(target), 1.0)
    while Fraction(eta) >= target:
        eta = math.nextafter(eta, 0.0)
    g_min = max(math.ceil(32 / Fraction(eta)), 4 * j)
    return eta, g_min


def check_profile_plan(f: RobustnessProfile, j: int, eta: float, g_min: int) -> bool:
    """Recheck ``1/(2j) >= 4 f(eta) + 1/g_min`` with exact comparisons."""
    slack = (Fraction(1, 2 * j) - Fraction(1, g_min)) / 4
    if slack < 0:
        return False
    return Fraction(eta) <= f.inverse(slack)


def realizable_sample_complexity(eps: float, delta: float, g: Callable[[int], int]) -> int:
    """``ceil(ln(1/delta) * g(ceil(1/eps)))``."""
    if not (0 < eps < 1 and 0 < delta < 1):
        raise ValueError("eps and delta must lie in (0, 1)")
    return math.ceil(math.log(1 / delta) * g(math.ceil(1 / eps)))


def random_member(rng, g: GFunction, j_range: tuple[int, int], universe: int = 64,
                  max_size: int = 8) -> CgParams:
    """A random in-class member with a small explicit ``B``; used by the learner checks."""
    j = j_range[0] + rng.integers(j_range[1] - j_range[0] + 1)
    size = 1 + rng.integers(max_size)
    B = FiniteSet(rng.sample_indices(universe, size))
    return CgParams(B, j, g(j))
