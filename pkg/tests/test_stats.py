from __future__ import annotations

import warnings
from fractions import Fraction

import numpy as np
import pytest

from cgsim.adversaries import v_sub
from cgsim.cg import CgParams, MetaQ, plan_parameters, GFunction, make_distribution
from cgsim.domain import CONST_ELEMENT, FiniteDistribution, Sample, tv_exact
from cgsim.rng import RandomSource
from cgsim.sets import FiniteSet, IntervalSet
from cgsim.stats import (
    CertificateRejected, InstanceTooLarge, advantage_from_features, binomial_se, birthday_bound,
    confusion_certificate, distinguisher_advantage, exact_channel_tv, indicator_presence,
    markov_indicator_bound, repeated_odds, tv_upper_bound_decomposition,
)


def test_birthday_values():
    assert birthday_bound(10, 1000) == pytest.approx(0.0956179, abs=1e-6)
    assert birthday_bound(1, 37, exact=True) == Fraction(1, 37)
    assert birthday_bound(50, 250_000) == pytest.approx(0.0099510, abs=1e-6)
    with pytest.raises(ValueError):
        birthday_bound(5, 4)


def test_markov_values():
    assert markov_indicator_bound(200, 0.1) == pytest.approx(0.1)
    assert markov_indicator_bound(10, 0.1) == 1.0
    assert markov_indicator_bound(200, Fraction(1, 10), exact=True) == Fraction(1, 10)


def test_decomposition_at_desk_params():
    p = CgParams(IntervalSet(1, 10**7), 2, 200)
    Q = MetaQ(p, 250_000)
    assert tv_upper_bound_decomposition(p, Q, 50, 0.1) == pytest.approx(0.11990231, abs=1e-8)
    assert tv_upper_bound_decomposition(p, Q, 0, 0.1) == pytest.approx(0.1)


def test_identical_samplers_give_no_advantage():
    p = CgParams(FiniteSet([1, 2, 3]), 2, 4)
    est = distinguisher_advantage(lambda s: p.sample(5, s), lambda s: p.sample(5, s),
                                  indicator_presence, 4000, RandomSource(1))
    assert abs(est.estimate) <= 3 * est.se + 1e-12


def test_disjoint_samplers_give_full_advantage():
    fa = np.zeros(2000)
    fb = np.ones(2000)
    est = advantage_from_features(fa, fb)
    assert est.estimate == 1.0 and est.direction == -1


def test_constant_feature_warns():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        est = advantage_from_features(np.ones(1500), np.ones(1500), "flat")
    assert est.estimate == 0 and caught


def test_small_n_rejected():
    with pytest.raises(ValueError):
        advantage_from_features(np.zeros(10), np.ones(10))


def test_held_out_estimate_is_not_biased_upwards():
    # pure noise features: the held-out estimate averages to zero
    rng = np.random.default_rng(0)
    vals = [advantage_from_features(rng.integers(0, 20, 1000), rng.integers(0, 20, 1000)).estimate
            for _ in range(200)]
    assert abs(np.mean(vals)) < 0.01


def test_exact_channel_tv_examples():
    p = CgParams(FiniteSet([1, 2]), 2, 4)
    assert exact_channel_tv(p, MetaQ(p, 2), 2) == 0
    Q = MetaQ(p, 1)
    mean_q = FiniteDistribution({e: sum(make_distribution(q)[e] for q in Q.members()) / 2
                                 for q in Q.members() for e in make_distribution(q).mass})
    assert exact_channel_tv(p, Q, 1) == tv_exact(make_distribution(p), mean_q)
    with pytest.raises(InstanceTooLarge):
        exact_channel_tv(CgParams(FiniteSet(range(8)), 2, 4), MetaQ(CgParams(FiniteSet(range(8)), 2, 4), 4), 2)


def test_exact_channel_tv_below_decomposition_bound():
    p = CgParams(FiniteSet([1, 2, 3, 4]), 2, 40)
    Q = MetaQ(p, 2)
    eta = Fraction(1, 2)
    exact = exact_channel_tv(p, Q, 2, lambda S, src: v_sub(S, eta, src))
    assert exact <= tv_upper_bound_decomposition(p, Q, 2, eta, exact=True)


def test_certificate_accepts_planner_output():
    plan = plan_parameters(1, GFunction(), 2)
    p = CgParams(IntervalSet(1, 2 * plan.n_required), plan.j, plan.k)
    cert = confusion_certificate(p, MetaQ(p, plan.n_required), plan.eta, plan.alpha, plan.gamma_prime, 2)
    assert cert.zeta <= 1 / 8 and cert.failure_floor >= 7 / 16


def test_certificate_desk_values():
    p = CgParams(IntervalSet(1, 10**7), 2, 200)
    cert = confusion_certificate(p, MetaQ(p, 250_000), 0.1, 0.5, 0.01, 50)
    assert cert.gamma == Fraction(6, 25)
    assert cert.failure_floor == pytest.approx(0.440049, abs=1e-6)


def test_certificate_rejections():
    p = CgParams(IntervalSet(1, 10**7), 2, 200)
    Q = MetaQ(p, 250_000)
    with pytest.raises(CertificateRejected) as err:
        confusion_certificate(p, Q, 0.1, 0.5, 0.1, 50)
    assert "gamma" in err.value.inequality
    small_k = CgParams(IntervalSet(1, 10**7), 2, 30)
    with pytest.raises(CertificateRejected) as err:
        confusion_certificate(small_k, MetaQ(small_k, 250_000), 0.1, 0.5, 0.0, 50)
    assert "zeta" in err.value.inequality
    with pytest.raises(CertificateRejected):
        confusion_certificate(p, MetaQ(p, 6_000_000), 0.1, 0.5, 0.01, 50)


def test_repeated_odds_feature():
    from cgsim.domain import odd
    assert repeated_odds(Sample([odd(1, 5), odd(1, 5)])) == 1
    assert repeated_odds(Sample([CONST_ELEMENT, CONST_ELEMENT, odd(1, 5)])) == 0


def test_binomial_se():
    assert binomial_se(0.5, 100) == pytest.approx(0.05)
    assert binomial_se(1.0, 100) == 0.0
