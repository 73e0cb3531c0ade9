"""The indicator-decoding learner and a minimum-distance proper learner."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .cg import CgParams, GFunction, distance
from .domain import CONST_ELEMENT, INDICATOR, FiniteDistribution, Sample
from .sets import compare_sets

POINT_MASS_AT_ORIGIN = FiniteDistribution.point_mass(CONST_ELEMENT)


@dataclass
class LearnerOutput:
    estimate: CgParams | FiniteDistribution
    decoded: CgParams | None = None
    diagnostics: dict = field(default_factory=dict)

    def error(self, truth, exact: bool = True):
        return distance(self.estimate, truth, exact)


class MalformedIndicator(ValueError):
    pass


def realizable_learner(S: Sample, g: GFunction) -> LearnerOutput:
    """Decode the most frequent indicator; with none, fall back to the point mass at (0, 0).

    Ties between indicators go to the smallest set encoding.  The fallback is
    exactly ``1/j`` away from any member with parameter ``j``.
    """
    counts = [(e, c) for e, c in S.items() if e.kind == INDICATOR]
    diag = {"indicators": sum(c for _, c in counts), "distinct_indicators": len(counts)}
    if not counts:
        return LearnerOutput(POINT_MASS_AT_ORIGIN, None, diag)
    best_e, best_c = counts[0]
    for e, c in counts[1:]:
        if c > best_c or (c == best_c and compare_sets(e.x, best_e.x) < 0):
            best_e, best_c = e, c
    level = best_e.level
    if level % 2 or level < 6:
        raise MalformedIndicator(f"indicator level {level} does not encode any j >= 2")
    j = (level - 2) // 2
    k = g(j)
    if k <= j:
        raise MalformedIndicator(f"g({j}) = {k} does not give a valid member")
    if best_e.x.size == 0:
        raise MalformedIndicator("indicator encodes the empty set")
    params = CgParams(best_e.x, j, k)
    return LearnerOutput(params, params, diag)


def empirical_overlap(S: Sample, cand: CgParams) -> Fraction:
    """``sum_x min(emp(x), cand(x))``, so that TV to the empirical law is one minus this."""
    total = Fraction(0)
    m = S.size
    for e, c in S.items():
        v = cand.mass(e)
        if v:
            total += min(Fraction(c, m), v)
    return total


def min_distance_learner(S: Sample, candidates: list[CgParams]) -> LearnerOutput:
    """The candidate closest in TV to the raw empirical distribution; first one wins ties."""
    if not candidates:
        raise ValueError("candidate list is empty")
    if S.size == 0:
        return LearnerOutput(candidates[0], candidates[0], {"index": 0})
    best_i, best = 0, empirical_overlap(S, candidates[0])
    for i, cand in enumerate(candidates[1:], start=1):
        ov = empirical_overlap(S, cand)
        if ov > best:
            best_i, best = i, ov
    return LearnerOutput(candidates[best_i], candidates[best_i],
                         {"index": best_i, "tv_to_empirical": float(1 - best)})


LEARNERS = {"realizable": realizable_learner, "min_distance": min_distance_learner}
