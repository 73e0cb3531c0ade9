"""Adaptive adversaries: subtractive deletion, its Bayes inverse, the additive
constructions built from the inverse, and the oblivious-to-adaptive lift."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .cg import CgParams, MetaQ, sample_q
from .domain import (
    CONST, CONST_ELEMENT, DELETED, DELETED_ELEMENT, INDICATOR, ODD, DomainElement,
    FiniteDistribution, Sample, _as_fraction, budget_count, ceil_count, choose, noind,
)
from .sets import EAGER_LIMIT, FiniteSet, LazySubset


class InconsistentSample(ValueError):
    """The observed sample cannot be an output of the subtractive channel under the prior."""


@dataclass(frozen=True)
class PowerOf:
    """Prior ``p^m``."""

    params: CgParams
    m: int

    @property
    def member_params(self) -> CgParams:
        return self.params

    def sample(self, rng) -> Sample:
        return self.params.sample(self.m, rng)

    def to_json(self) -> dict:
        return {"form": "power", "params": self.params.to_json(), "m": self.m}


@dataclass(frozen=True)
class MetaPower:
    """Prior ``|Q|^m``: draw ``q ~ Q`` then ``m`` i.i.d. points from ``q``."""

    Q: MetaQ
    m: int

    @property
    def member_params(self) -> CgParams:
        return self.Q.base

    def sample(self, rng) -> Sample:
        return sample_q(self.Q, rng).sample(self.m, rng)

    def to_json(self) -> dict:
        return {"form": "meta", "Q": self.Q.to_json(), "m": self.m}


Prior = PowerOf | MetaPower


def v_sub(S: Sample, eta, rng) -> Sample:
    """Delete ``floor(eta |S|)`` points, indicators first.

    If the indicators fit in the budget they all go and the rest of the budget
    is spent on a uniform choice of non-indicators; otherwise every
    non-indicator is kept and a uniform choice of indicators is removed.
    """
    b = budget_count(eta, S.size)
    if b == 0:
        return S
    keep = S.size - b
    inds = S.of_kind(INDICATOR)
    if any(e.kind == DELETED for e in S.distinct()):
        raise ValueError("subtractive adversary applied to a sample with deleted marks")
    if inds.size <= b:
        return choose(noind(S), keep, rng)
    return noind(S) + choose(inds, inds.size - b, rng)


def _check_odds(odds: Sample, params: CgParams, within) -> list[int]:
    values = []
    for e in odds.distinct():
        if e.level != params.odd_level:
            raise InconsistentSample(f"odd {e!r} at level {e.level}, expected {params.odd_level}")
        if e.x not in within:
            raise InconsistentSample(f"odd value {e.x} outside the member's set")
        values.append(e.x)
    return values


def inverse_sub(S_out: Sample, prior: Prior, eta, rng) -> Sample:
    """Sample ``S`` from the prior conditioned on the subtractive channel producing ``S_out``.

    The channel's deletions depend only on category counts and ``choose`` is
    exchangeable, so the posterior factors: the number ``t`` of deleted
    indicators has weight ``C(m, t) (k-1)^(b-t)`` on ``0..b``, the ``b - t``
    deleted non-indicators are fresh draws from the member's non-indicator
    part, and under a meta prior the member's set is uniform among size-``s``
    subsets of the base containing every observed odd value.
    """
    m = prior.m
    b = budget_count(eta, m)
    if S_out.size != m - b:
        raise InconsistentSample(f"channel output has size {S_out.size}, expected {m - b}")
    params = prior.member_params
    odds = S_out.of_kind(ODD)
    inds = S_out.of_kind(INDICATOR)
    if any(e.kind not in (CONST, ODD, INDICATOR) for e in S_out.distinct()):
        raise InconsistentSample("output contains deleted marks")
    D = _check_odds(odds, params, params.B)

    if isinstance(prior, MetaPower) and len(D) > prior.Q.subset_size:
        raise InconsistentSample(f"{len(D)} distinct odd values cannot fit in a size-{prior.Q.subset_size} subset")

    if inds.size:
        distinct = list(inds.distinct())
        if len(distinct) > 1:
            raise InconsistentSample("output holds indicators of two different members")
        ind = distinct[0]
        if ind.level != params.indicator_level:
            raise InconsistentSample(f"indicator level {ind.level}, expected {params.indicator_level}")
        X = ind.x
        if isinstance(prior, PowerOf):
            if X != params.B:
                raise InconsistentSample("indicator does not name the prior's member")
        else:
            if X.size != prior.Q.subset_size or not X.issubset(params.B):
                raise InconsistentSample("indicator does not name a member of the meta prior")
            if any(x not in X for x in D):
                raise InconsistentSample("an observed odd value lies outside the indicated set")
        # more indicators than the budget: exactly b of them were removed
        return S_out + Sample({ind: b}) if b else S_out

    if b == 0:
        return S_out
    k = params.k
    weights = [comb(m, t) * (k - 1) ** (b - t) for t in range(b + 1)]
    t = rng.categorical(weights)
    member = params if isinstance(prior, PowerOf) else _posterior_member(prior.Q, D, rng)
    extra = member.sample_nonindicators(b - t, rng)
    if t:
        extra = extra + Sample({member.indicator: t})
    return S_out + extra


def _posterior_member(Q: MetaQ, D: list[int], rng) -> CgParams:
    """A member of ``Q`` uniform among those whose set contains ``D``."""
    B, s = Q.base.B, Q.subset_size
    if s == B.size:
        return Q.base
    D = sorted(D)
    if rng.exact or B.size <= EAGER_LIMIT:
        rest = B.draw_excluding(rng, set(D), s - len(D))
        return CgParams(FiniteSet(D + list(rest)), Q.base.j, Q.base.k)
    return CgParams(LazySubset(B, s, rng.child(), revealed=D), Q.base.j, Q.base.k)


def _pad(S_sub: Sample, n: int) -> Sample:
    return S_sub + Sample({CONST_ELEMENT: n}) if n else S_sub


def add_from_sub(S: Sample, S_sub: Sample, prior: Prior, eta, rng,
                 on_inconsistent: str = "raise") -> Sample:
    """``S`` plus whatever the prior's inverse restores on top of ``S_sub``.

    When ``S_sub`` is impossible under ``prior`` (this happens only when more
    indicators than the budget survive), ``on_inconsistent="pad"`` adds
    constants instead so the size contract still holds.
    """
    try:
        restored = inverse_sub(S_sub, prior, eta, rng)
    except InconsistentSample:
        if on_inconsistent != "pad":
            raise
        restored = _pad(S_sub, prior.m - S_sub.size)
    return S + (restored - S_sub)


def v_add_pair(S: Sample, eta, other_prior: Prior, rng, on_inconsistent: str = "raise") -> Sample:
    """Additive adversary: delete with the subtractive channel, then restore as if
    the sample had come from ``other_prior``, and keep the original points too."""
    if not _as_fraction(eta) < Fraction(1, 2):
        raise ValueError("the paired additive adversary needs eta < 1/2")
    if S.size != other_prior.m:
        raise ValueError(f"sample size {S.size} does not match the prior's m={other_prior.m}")
    S_sub = v_sub(S, eta, rng)
    return add_from_sub(S, S_sub, other_prior, eta, rng, on_inconsistent)


@dataclass(frozen=True)
class UniversalAdditiveConfig:
    k: int
    prior_p: Prior
    prior_q: Prior
    eta: object

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not _as_fraction(self.eta) < Fraction(1, 2 * self.k):
            raise ValueError(f"the universal additive adversary needs eta < 1/(2k) = 1/{2 * self.k}")
        if self.prior_p.m != self.prior_q.m:
            raise ValueError("both priors must use the same m")


def add_k_from_sub(S: Sample, S_sub: Sample, cfg: UniversalAdditiveConfig, rng,
                   on_inconsistent: str = "raise", with_u: bool = False):
    u = rng.integers(cfg.k + 1)
    out = S
    for i in range(1, cfg.k + 1):
        prior = cfg.prior_p if i <= u else cfg.prior_q
        try:
            restored = inverse_sub(S_sub, prior, cfg.eta, rng)
        except InconsistentSample:
            if on_inconsistent != "pad":
                raise
            restored = _pad(S_sub, prior.m - S_sub.size)
        out = out + (restored - S_sub)
    return (out, u) if with_u else out


def v_add_k(S: Sample, cfg: UniversalAdditiveConfig, rng, on_inconsistent: str = "raise",
            with_u: bool = False):
    """Universal additive adversary mixing ``k`` restorations.

    ``u`` is uniform on ``0..k``; restorations ``1..u`` use the ``p^m`` prior
    and the rest the ``|Q|^m`` prior.  The output adds ``k floor(eta m)`` points.
    """
    if S.size != cfg.prior_p.m:
        raise ValueError(f"sample size {S.size} does not match the priors' m={cfg.prior_p.m}")
    S_sub = v_sub(S, cfg.eta, rng)
    return add_k_from_sub(S, S_sub, cfg, rng, on_inconsistent, with_u)


# -- oblivious to adaptive lift -------------------------------------------

def _deletion_prob(x: DomainElement, p: FiniteDistribution, r: FiniteDistribution, eta):
    px = p[x]
    if px == 0:
        raise ValueError(f"{x!r} has zero probability under p")
    eta = _as_fraction(eta) if p.exact else float(eta)
    d = eta * r[x]
    if d > px:
        raise ValueError(f"eta * r(x) = {d} exceeds p(x) = {px}; not a valid subtractive decomposition")
    return d / px


def element_random_delete(x: DomainElement, p: FiniteDistribution, r: FiniteDistribution, eta, rng):
    """Replace ``x`` by the deleted mark with probability ``eta r(x) / p(x)``."""
    prob = _deletion_prob(x, p, r, eta)
    if prob == 0:
        return x
    return DELETED_ELEMENT if rng.bernoulli(prob) else x


def sample_random_delete(S: Sample, p: FiniteDistribution, r: FiniteDistribution, eta, rng) -> Sample:
    return Sample(element_random_delete(x, p, r, eta, rng) for x in S)


def v_adp_lift(S: Sample, p: FiniteDistribution, r: FiniteDistribution, eta, rng,
               with_case: bool = False):
    """Adaptive adversary removing exactly ``ceil(eta m)`` points built from an oblivious one.

    Each point is marked deleted independently; if too few survive the output
    is topped up with uniformly chosen marked points (case 1), otherwise it is
    a uniform subset of the survivors (case 2).
    """
    m = S.size
    target = m - ceil_count(eta, m)
    marked = sample_random_delete(S, p, r, eta, rng)
    survivors = marked - Sample({DELETED_ELEMENT: marked.count(DELETED_ELEMENT)})
    if survivors.size < target:
        out, case = survivors + choose(S - survivors, target - survivors.size, rng), 1
    else:
        out, case = choose(survivors, target, rng), 2
    return (out, case) if with_case else out


def oblivious_target(p: FiniteDistribution, r: FiniteDistribution, eta) -> FiniteDistribution:
    """``(p - eta r) / (1 - eta)``, the law of a surviving point."""
    exact = p.exact
    eta = _as_fraction(eta) if exact else float(eta)
    mass = {}
    for e, v in p.mass.items():
        w = (v - eta * r[e]) / (1 - eta)
        if w < 0:
            raise ValueError("eta * r exceeds p")
        mass[e] = w
    return FiniteDistribution(mass, exact=exact)
