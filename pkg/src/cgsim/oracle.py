"""Exact enumeration oracles for tiny instances.

Everything here runs the ordinary samplers under :func:`cgsim.rng.enumerate_law`
and combines the resulting laws with Bayes' rule in rational arithmetic.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .adversaries import (
    MetaPower, PowerOf, inverse_sub, oblivious_target, sample_random_delete, v_adp_lift, v_sub,
)
from .cg import CgParams, MetaQ
from .domain import DELETED_ELEMENT, FiniteDistribution, Sample, ceil_count, sample_iid
from .rng import enumerate_law
from .sets import FiniteSet
from .stats import law_tv


def prior_law(prior) -> dict:
    return enumerate_law(prior.sample)


def sub_channel_law(S: Sample, eta) -> dict:
    return enumerate_law(lambda src: v_sub(S, eta, src))


def bayes_posterior(S_out: Sample, prior, eta, prior_table: dict | None = None) -> dict:
    """Posterior of the clean sample given the channel output, by brute-force Bayes."""
    table = prior_table if prior_table is not None else prior_law(prior)
    post = {}
    for S, w in table.items():
        if not S_out.issubset(S):
            continue
        like = sub_channel_law(S, eta).get(S_out, 0)
        if like:
            post[S] = w * like
    total = sum(post.values())
    if total == 0:
        raise ValueError("output has zero probability under the prior")
    return {S: v / total for S, v in post.items()}


def structured_posterior(S_out: Sample, prior, eta) -> dict:
    return enumerate_law(lambda src: inverse_sub(S_out, prior, eta, src))


def round_trip_tv(prior, eta) -> Fraction:
    """TV between the law of ``inverse_sub(v_sub(S))`` for ``S ~ prior`` and the prior."""
    clean = prior_law(prior)
    restored = enumerate_law(lambda src: inverse_sub(v_sub(prior.sample(src), eta, src), prior, eta, src))
    return law_tv(clean, restored)


def posterior_agreement(prior, eta) -> Fraction:
    """Largest TV, over reachable outputs, between the structured and brute-force posteriors."""
    table = prior_law(prior)
    outputs = enumerate_law(lambda src: v_sub(prior.sample(src), eta, src))
    worst = Fraction(0)
    for S_out in outputs:
        worst = max(worst, law_tv(structured_posterior(S_out, prior, eta),
                                  bayes_posterior(S_out, prior, eta, table)))
    return worst


def micro_instances():
    """Tiny priors (m <= 3, at most 6 support points) used by the round-trip checks."""
    sets = [FiniteSet([1]), FiniteSet([1, 2]), FiniteSet([1, 2, 3]), FiniteSet([0, 2, 5, 7])]
    etas = [Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3)]
    out = []
    for B, (j, k), m in itertools.product(sets, [(2, 3), (2, 4), (3, 5)], [1, 2, 3]):
        for eta in etas:
            if B.size <= 2 or m <= 2:
                out.append((f"power B={sorted(B.elements)} j={j} k={k} m={m} eta={eta}",
                            PowerOf(CgParams(B, j, k), m), eta))
    for B, s, m in [(FiniteSet([1, 2]), 1, 2), (FiniteSet([1, 2, 3]), 1, 2), (FiniteSet([1, 2, 3]), 2, 2),
                    (FiniteSet([1, 2, 3, 4]), 2, 2), (FiniteSet([1, 2, 3]), 2, 3)]:
        for eta in (Fraction(1, 2), Fraction(1, 3)):
            out.append((f"meta B={sorted(B.elements)} s={s} m={m} eta={eta}",
                        MetaPower(MetaQ(CgParams(B, 2, 4), s), m), eta))
    return out


# -- oblivious lift ---------------------------------------------------------

def lift_case2_tv(p: FiniteDistribution, r: FiniteDistribution, eta, m: int):
    """TV between the lift's output given case 2 and i.i.d. draws from the surviving law.

    Returns ``(tv, P(case 2))``.
    """
    law = enumerate_law(lambda src: v_adp_lift(p.sample_iid(m, src), p, r, eta, src, with_case=True))
    case2 = {out: w for (out, case), w in law.items() if case == 2}
    mass2 = sum(case2.values())
    conditional = {out: w / mass2 for out, w in case2.items()}
    target = m - ceil_count(eta, m)
    vobl = oblivious_target(p, r, eta)
    reference = enumerate_law(lambda src: sample_iid(vobl, target, src))
    return law_tv(conditional, reference), mass2


def deletion_product_tv(p: FiniteDistribution, r: FiniteDistribution, eta, m: int):
    """TV between marking ``S ~ p^m`` point by point and drawing ``m`` points from
    ``(1 - eta) V_obl(p) + eta δ_⊥``."""
    marked = enumerate_law(lambda src: sample_random_delete(p.sample_iid(m, src), p, r, eta, src))
    vobl = oblivious_target(p, r, eta)
    eta = Fraction(eta)
    mixed = {e: (1 - eta) * v for e, v in vobl.mass.items()}
    mixed[DELETED_ELEMENT] = eta
    q = FiniteDistribution(mixed, exact=True)
    reference = enumerate_law(lambda src: sample_iid(q, m, src))
    return law_tv(marked, reference)
