"""Bounds, held-out threshold distinguishers and confusion certificates."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .cg import CgParams, MetaQ, tv_lower_bound
from .domain import INDICATOR, ODD, Sample


def birthday_bound(m: int, s: int, exact: bool = False):
    """``1 - (1 - m/s)^m``, an upper bound on a repeat among ``m`` uniform draws from ``s`` points."""
    if m > s:
        raise ValueError(f"birthday bound needs m <= s, got m={m}, s={s}")
    if exact:
        return 1 - (1 - Fraction(m, s)) ** m
    if m == 0:
        return 0.0
    # log1p keeps precision when m/s is tiny
    return -math.expm1(m * math.log1p(-m / s))


def markov_indicator_bound(k: int, eta, exact: bool = False):
    """``min(1, 2/(k eta))``: both indicator tails beyond the deletion budget together."""
    if k <= 0 or eta <= 0:
        raise ValueError("k and eta must be positive")
    if exact:
        return min(Fraction(1), Fraction(2) / (k * Fraction(eta)))
    return min(1.0, 2.0 / (k * float(eta)))


def tv_upper_bound_decomposition(params: CgParams, Q: MetaQ, m: int, eta, exact: bool = False):
    """Certified bound on the TV between the subtractive channel outputs of ``p^m`` and ``|Q|^m``.

    Outside the events "some odd value repeats" (under either law) and "more
    indicators than the deletion budget" (under either law), the two outputs
    have the same law.
    """
    total = 2 * birthday_bound(m, Q.subset_size, exact) + markov_indicator_bound(params.k, eta, exact)
    return min(Fraction(1) if exact else 1.0, total)


# -- features -------------------------------------------------------------

def indicator_presence(S: Sample) -> int:
    return int(any(e.kind == INDICATOR for e in S.distinct()))


def repeated_odds(S: Sample) -> int:
    return int(any(c > 1 for e, c in S.items() if e.kind == ODD))


def odds_count(S: Sample) -> int:
    return S.count_kind(ODD)


def repeated_elements(S: Sample) -> int:
    """Any element of any kind appearing twice."""
    return int(any(c > 1 for _, c in S.items()))


FEATURES: dict[str, Callable[[Sample], int]] = {
    "indicator-presence": indicator_presence,
    "repeated-odds": repeated_odds,
    "odds-count": odds_count,
}


# -- distinguishers -------------------------------------------------------

@dataclass
class AdvantageEstimate:
    estimate: float
    se: float
    n: int
    name: str
    threshold: float | None = None
    direction: int = 1

    def to_json(self) -> dict:
        return {"estimate": self.estimate, "se": self.se, "n": self.n, "name": self.name,
                "threshold": self.threshold, "direction": self.direction}


def _best_threshold(fa: np.ndarray, fb: np.ndarray) -> tuple[float, int, float]:
    """Threshold ``t`` and sign maximising ``|P_A(f >= t) - P_B(f >= t)|`` on the given data."""
    values = np.unique(np.concatenate([fa, fb]))
    sa, sb = np.sort(fa), np.sort(fb)
    pa = 1 - np.searchsorted(sa, values, side="left") / len(sa)
    pb = 1 - np.searchsorted(sb, values, side="left") / len(sb)
    gap = pa - pb
    i = int(np.argmax(np.abs(gap)))
    return float(values[i]), (1 if gap[i] >= 0 else -1), float(abs(gap[i]))


def advantage_from_features(fa: Sequence, fb: Sequence, name: str = "feature",
                            min_n: int = 1000) -> AdvantageEstimate:
    """Held-out advantage of the best threshold event on a scalar feature.

    The first half of each array picks the threshold and direction; the second
    half estimates ``P_A(E) - P_B(E)`` for that fixed event, which is an
    unbiased estimate of a quantity no larger than the TV distance.
    """
    fa = np.asarray(fa, dtype=float)
    fb = np.asarray(fb, dtype=float)
    n = min(len(fa), len(fb))
    if n < min_n:
        raise ValueError(f"need at least {min_n} trials per side, got {n}")
    half = n // 2
    train_a, test_a = fa[:half], fa[half:n]
    train_b, test_b = fb[:half], fb[half:n]
    if np.all(fa[:n] == fa[0]) and np.all(fb[:n] == fa[0]):
        warnings.warn(f"feature {name!r} is constant on both samplers; advantage set to 0")
        return AdvantageEstimate(0.0, 0.0, n, name, float(fa[0]), 1)
    t, direction, _ = _best_threshold(train_a, train_b)
    ea = test_a >= t
    eb = test_b >= t
    pa, pb = float(ea.mean()), float(eb.mean())
    n_test = len(test_a)
    se = math.sqrt((pa * (1 - pa) + pb * (1 - pb)) / n_test)
    return AdvantageEstimate(direction * (pa - pb), se, n, name, t, direction)


def distinguisher_advantage(sampler_a, sampler_b, feature, n: int, rng, name: str = "feature"):
    """Draw ``n`` samples from each sampler and report the held-out advantage of ``feature``.

    Samplers take a :class:`~cgsim.rng.RandomSource` and return a sample; trial
    ``i`` of side A uses stream ``(0, i)`` and of side B stream ``(1, i)``.
    """
    if n < 1000:
        raise ValueError("distinguisher estimates need N >= 1000")
    fa = [feature(sampler_a(rng.spawn(0, i))) for i in range(n)]
    fb = [feature(sampler_b(rng.spawn(1, i))) for i in range(n)]
    return advantage_from_features(fa, fb, name)


# -- exact laws -----------------------------------------------------------

def law_tv(a: dict, b: dict):
    """TV between two exact laws given as ``{outcome: probability}`` maps."""
    zero = Fraction(0)
    total = zero
    for key in a.keys() | b.keys():
        total += abs(a.get(key, zero) - b.get(key, zero))
    return total / 2


class InstanceTooLarge(ValueError):
    pass


def exact_channel_tv(p: CgParams, Q: MetaQ, m: int, adversary=None, limit: int = 2_000_000):
    """Exact TV between ``adversary(p^m)`` and ``adversary(|Q|^m)`` by enumeration.

    ``adversary(S, src)`` must draw only through the source primitives; ``None``
    means the identity channel.
    """
    from .cg import sample_q
    from .rng import enumerate_law

    support = 2 + max(p.B.size, Q.base.B.size)
    if m > 3 or support > 6 or Q.n_members() > 100:
        raise InstanceTooLarge(f"m={m}, support={support}, members={Q.n_members()} exceed the oracle's range")
    adv = adversary or (lambda S, src: S)
    law_p = enumerate_law(lambda src: adv(p.sample(m, src), src), limit)
    law_q = enumerate_law(lambda src: adv(sample_q(Q, src).sample(m, src), src), limit)
    return law_tv(law_p, law_q)


# -- certificates ---------------------------------------------------------

class CertificateRejected(ValueError):
    def __init__(self, inequality: str, lhs, rhs):
        self.inequality, self.lhs, self.rhs = inequality, lhs, rhs
        super().__init__(f"{inequality} fails: {float(lhs):.6g} vs {float(rhs):.6g}")


@dataclass
class ConfusionParams:
    gamma: Fraction
    zeta: float
    m: int
    alpha: Fraction
    eta: Fraction
    gamma_prime: Fraction
    separation: Fraction
    failure_floor: float

    def to_json(self) -> dict:
        return {
            "gamma": float(self.gamma), "gamma_exact": str(self.gamma),
            "zeta_ub": self.zeta, "m": self.m, "alpha": str(self.alpha),
            "eta": str(self.eta), "gamma_prime": str(self.gamma_prime),
            "separation": float(self.separation), "failure_floor": self.failure_floor,
        }


def confusion_certificate(p: CgParams, Q: MetaQ, eta, alpha, gamma_prime, m: int,
                          max_zeta: float = 0.5) -> ConfusionParams:
    """Certify that the subtractive channel at budget ``eta`` confuses ``p`` with ``Q``.

    Condition (1): every member of ``Q`` is more than ``gamma = 4 alpha eta + 4 gamma'``
    from ``p``, certified by the half-size separation bound.  Condition (2): the
    channel outputs are within ``zeta_ub`` of each other, and ``zeta_ub`` is small
    enough (below ``max_zeta``) for the failure floor to be useful.
    """
    eta = Fraction(repr(eta)) if isinstance(eta, float) else Fraction(eta)
    alpha = Fraction(repr(alpha)) if isinstance(alpha, float) else Fraction(alpha)
    gamma_prime = Fraction(repr(gamma_prime)) if isinstance(gamma_prime, float) else Fraction(gamma_prime)
    if Q.base != p:
        raise CertificateRejected("Q restricts p", 0, 1)
    if 2 * Q.subset_size > p.B.size:
        raise CertificateRejected("2 s <= |B|", 2 * Q.subset_size, p.B.size)
    gamma = 4 * alpha * eta + 4 * gamma_prime
    separation = tv_lower_bound(p.j, p.k)
    if not gamma < separation:
        raise CertificateRejected("gamma < (1/j - 1/k)/2", gamma, separation)
    zeta = tv_upper_bound_decomposition(p, Q, m, eta)
    if not zeta < max_zeta:
        raise CertificateRejected(f"zeta_ub < {max_zeta}", zeta, max_zeta)
    return ConfusionParams(gamma, zeta, m, alpha, eta, gamma_prime, separation, (1 - zeta) / 2)


def binomial_se(freq: float, n: int) -> float:
    return math.sqrt(max(freq * (1 - freq), 0.0) / n)
