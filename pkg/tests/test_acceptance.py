"""Acceptance criteria at desk scale, one printed pass/fail line per criterion.

The confusion, transfer and universal-additive criteria share one desk
simulation of 10^5 trials per side; the failure criterion runs its own 5000
trials per side with both learners, as the command-line runs do.
"""

from __future__ import annotations

import time
from fractions import Fraction

import pytest

from conftest import ACCEPTANCE_LINES

from cgsim import harness
from cgsim.adversaries import (
    MetaPower, PowerOf, UniversalAdditiveConfig, add_from_sub, add_k_from_sub, v_adp_lift, v_sub,
)
from cgsim.cg import CgParams, MetaQ, make_distribution, tv_lower_bound
from cgsim.domain import (
    CONST_ELEMENT, INDICATOR, FiniteDistribution, Sample, budget_count, ceil_count, indicator, tv_exact,
)
from cgsim.rng import RandomSource
from cgsim.sets import FiniteSet

pytestmark = pytest.mark.slow

DESK_TRIALS = 100_000
LEARN_TRIALS = 5000


def record(number: int, title: str, verdicts: list, elapsed: float, limit: float):
    failed = [v for v in verdicts if v["verdict"] == "FAIL"]
    ok = not failed and elapsed < limit
    status = "PASS" if ok else "FAIL"
    detail = f"{len(verdicts)} checks, {len(failed)} failed, {elapsed:.1f}s (limit {limit:.0f}s)"
    if failed:
        detail += "; first failure: " + failed[0]["name"]
    line = f"criterion {number:02d} {status}: {title} [{detail}]"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert not failed, failed
    assert elapsed < limit, f"took {elapsed:.1f}s"


@pytest.fixture(scope="session")
def desk():
    return harness.load_config()


@pytest.fixture(scope="session")
def confusion(desk):
    t0 = time.perf_counter()
    report = harness.run_confusion(desk, trials=DESK_TRIALS)
    return report, time.perf_counter() - t0


def _select(report, *prefixes):
    return [v for v in report.verdicts if v["name"].startswith(prefixes)]


def test_criterion_01_separation_lower_bound():
    t0 = time.perf_counter()
    root = RandomSource(101)
    verdicts = []
    for i in range(200):
        rng = root.spawn(i)
        size = 2 + rng.integers(7)
        B = sorted(int(x) for x in rng.sample_indices(20, size))
        sub = [B[int(t)] for t in rng.sample_indices(size, 1 + rng.integers(size // 2))]
        j = 2 + rng.integers(5)
        k = j + 1 + rng.integers(30)
        p = make_distribution(CgParams(FiniteSet(B), j, k))
        q = make_distribution(CgParams(FiniteSet(sub), j, k))
        tv = tv_exact(p, q)
        verdicts.append(harness.check(f"grid {i}", tv, ">=", tv_lower_bound(j, k)))
    record(1, "exact TV >= (1/j - 1/k)/2 on 200 random half-size restrictions", verdicts,
           time.perf_counter() - t0, 10)


def test_criterion_02_inversion_round_trip(desk):
    t0 = time.perf_counter()
    report = harness.run_invert_check(desk)
    record(2, f"exact round trip of the inverse on {report.summary['instances']} micro instances",
           report.verdicts, time.perf_counter() - t0, 120)


def test_criterion_03_confusion_bound(confusion):
    report, elapsed = confusion
    verdicts = _select(report, "condition", "sub channel")
    zeta = report.summary["zeta_ub"]
    assert abs(zeta - 0.11990231) < 1e-6
    record(3, f"subtractive channel advantages <= zeta_ub = {zeta:.4f} + 3 se at N=10^5", verdicts,
           elapsed, 300)


def test_criterion_04_additive_transfer(confusion):
    report, elapsed = confusion
    verdicts = _select(report, "transfer", "pair")
    record(4, "paired additive advantage <= subtractive advantage + 3 se", verdicts, elapsed, 300)


def test_criterion_05_universal_additive_cap(confusion):
    report, elapsed = confusion
    verdicts = _select(report, "addk")
    assert any("size" in v["name"] for v in verdicts)
    record(5, "k=2 additive advantage <= zeta_ub + 1/3 + 3 se, sizes m + k floor(eta m)", verdicts,
           elapsed, 300)


def test_criterion_06_failure_floor(desk):
    t0 = time.perf_counter()
    report = harness.run_failure(desk, trials=LEARN_TRIALS)
    assert len(report.summary["rates"]) == 4
    record(6, "f_p + f_Q >= 1 - zeta_ub - 3 se for both learners under sub and addk; control <= 0.05",
           report.verdicts, time.perf_counter() - t0, 600)


def test_criterion_07_realizable(desk):
    t0 = time.perf_counter()
    report = harness.run_realizable(desk, trials=10_000)
    assert [c["m"] for c in report.summary["cells"]] == [461, 300, 74, 48]
    record(7, "realizable success >= 1 - delta - 3 se over 10^4 trials per cell", report.verdicts,
           time.perf_counter() - t0, 120)


def test_criterion_08_oblivious_lift(desk):
    t0 = time.perf_counter()
    report = harness.run_lift_check(desk, trials=100_000)
    record(8, "deletion rate within 5 sigma of eta, case 2 >= 1/2 - 3 se, exact conditional laws",
           report.verdicts, time.perf_counter() - t0, 120)


def test_criterion_09_budget_invariants():
    t0 = time.perf_counter()
    p = CgParams(FiniteSet(range(6)), 2, 4)
    Q = MetaQ(p, 3)
    pd = make_distribution(p).as_float()
    r = FiniteDistribution({p.indicator: 0.5, CONST_ELEMENT: 0.5}, exact=False)
    strays = [indicator(FiniteSet([x]), 6) for x in range(3)]
    root = RandomSource(909)
    cases = 100_000
    violations = 0
    for i in range(cases):
        rng = root.spawn(i)
        m = 1 + rng.integers(30)
        S = p.sample(m, rng)
        if i % 5 == 0:
            # corrupted inputs carrying indicators of other members
            n_stray = 1 + rng.integers(3)
            S = Sample(list(S)[n_stray:] + [strays[rng.integers(3)] for _ in range(n_stray)]) if m > n_stray else S
        m = S.size
        eta = Fraction(rng.integers(12), 40)
        b = budget_count(eta, m)
        out = v_sub(S, eta, rng)
        ok = out.size == m - b and out.issubset(S)
        if S.count_kind(INDICATOR) <= b:
            ok &= out.count_kind(INDICATOR) == 0
        if i % 2:
            add = add_from_sub(S, out, MetaPower(Q, m), eta, rng, "pad")
            ok &= add.size == m + b and S.issubset(add)
        elif eta < Fraction(1, 4):
            cfg = UniversalAdditiveConfig(2, PowerOf(p, m), MetaPower(Q, m), eta)
            add = add_k_from_sub(S, out, cfg, rng, "pad")
            ok &= add.size == m + 2 * b and S.issubset(add)
        if i % 5:
            lift_eta = float(eta) / 2
            lifted = v_adp_lift(S, pd, r, lift_eta, rng)
            ok &= lifted.size == m - ceil_count(lift_eta, m) and lifted.issubset(S)
        violations += not ok
    verdicts = [harness.check(f"violations over {cases} randomized cases", violations, "==", 0)]
    record(9, "size contracts and inclusion relations hold on 10^5 randomized cases", verdicts,
           time.perf_counter() - t0, 60)


def test_criterion_10_example_b(desk):
    t0 = time.perf_counter()
    report = harness.run_example_b(desk, trials=100_000)
    assert report.summary["B_size"] == 7680
    assert report.summary["separation"] == str(1 - Fraction(1, 32))
    record(10, "repeated-element advantage <= zeta + 3 se at |B| = 7680; separation 1 - 2^-5",
           report.verdicts, time.perf_counter() - t0, 120)
