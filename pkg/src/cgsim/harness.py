"""Seeded experiment runners and their reports.

Each ``run_*`` function is a pure function of its config (seed included): the
summary and per-trial files it writes are byte-identical across runs.  Wall
time is kept out of those files and written to ``timing.json`` instead.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from . import oracle
from .adversaries import (
    MetaPower, PowerOf, UniversalAdditiveConfig, add_from_sub, add_k_from_sub, v_adp_lift, v_sub,
)
from .cg import (
    CgParams, GFunction, MetaQ, distance, make_distribution, plan_parameters,
    random_member, realizable_sample_complexity, sample_q, set_from_json,
)
from .domain import (
    CONST_ELEMENT, INDICATOR, FiniteDistribution, Sample, budget_count,
    ceil_count, odd,
)
from .learners import min_distance_learner, realizable_learner
from .rng import RandomSource
from .sets import FiniteSet, IntervalSet, LazySubset
from .stats import (
    FEATURES, CertificateRejected, advantage_from_features, binomial_se, birthday_bound,
    confusion_certificate, markov_indicator_bound, repeated_elements, tv_upper_bound_decomposition,
)

PASS, FAIL, INFORMATIVE = "PASS", "FAIL", "INFORMATIVE"

# stream-id prefixes; trial t of a side draws from (prefix, t)
SIDE_P, SIDE_Q, CANDIDATES, CONTROL_P, CONTROL_Q, LIFT, EXAMPLE_B, REALIZABLE = range(8)


def load_config(path: str | Path | None = None) -> dict:
    """Read a JSON config; ``None`` gives the committed desk-scale config."""
    if path is None:
        text = resources.files("cgsim").joinpath("configs/desk.json").read_text()
    else:
        text = Path(path).read_text()
    return json.loads(text)


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _frac(x) -> Fraction:
    return Fraction(repr(x)) if isinstance(x, float) else Fraction(x)


def check(name: str, lhs, op: str, rhs, informative: bool = False) -> dict:
    """A verdict line naming the inequality and both sides."""
    ok = {"<=": lhs <= rhs, ">=": lhs >= rhs, "<": lhs < rhs, "==": lhs == rhs}[op]
    verdict = INFORMATIVE if informative else (PASS if ok else FAIL)
    return {"name": name, "inequality": f"lhs {op} rhs", "lhs": _num(lhs), "rhs": _num(rhs),
            "verdict": verdict}


def _num(x):
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return x


@dataclass
class RunReport:
    kind: str
    config: dict
    summary: dict = field(default_factory=dict)
    verdicts: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    row_fields: list = field(default_factory=list)
    estimates: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(v["verdict"] != FAIL for v in self.verdicts)

    def summary_json(self) -> str:
        doc = {"kind": self.kind, "config_hash": config_hash(self.config), "config": self.config,
               "summary": self.summary, "verdicts": self.verdicts,
               "all_pass": self.passed}
        return json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"

    def trials_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.row_fields)
        for row in self.rows:
            w.writerow([_num(row[f]) for f in self.row_fields])
        return buf.getvalue()

    def estimates_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["config_hash", "name", "estimate", "se", "n", "bound", "verdict"])
        h = config_hash(self.config)
        for e in self.estimates:
            w.writerow([h, e["name"], e["estimate"], e["se"], e["n"], e["bound"], e["verdict"]])
        return buf.getvalue()

    def write(self, out: str | Path) -> Path:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "summary.json").write_text(self.summary_json())
        if self.row_fields:
            (out / "trials.csv").write_text(self.trials_csv())
        if self.estimates:
            (out / "estimates.csv").write_text(self.estimates_csv())
        (out / "timing.json").write_text(json.dumps({"wall_time_s": self.wall_time}) + "\n")
        return out

    def lines(self) -> list[str]:
        return [f"{v['verdict']:<11} {v['name']}: {v['lhs']:.6g} {v['inequality'].split()[1]} {v['rhs']:.6g}"
                if isinstance(v["lhs"], (int, float)) else f"{v['verdict']:<11} {v['name']}"
                for v in self.verdicts]


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


# -- desk-scale confusion setup -------------------------------------------

@dataclass
class DeskSetup:
    p: CgParams
    Q: MetaQ
    g: GFunction
    eta: Fraction
    m: int
    k_add: int
    prior_p: PowerOf
    prior_q: MetaPower
    addk: UniversalAdditiveConfig | None
    alpha: Fraction
    gamma_prime: Fraction

    @property
    def budget(self) -> int:
        return budget_count(self.eta, self.m)


def desk_setup(config: dict) -> DeskSetup:
    cls = config["class"]
    g = GFunction.from_json(cls.get("g", "square"))
    j = cls["j"]
    p = CgParams(set_from_json(cls["B"]), j, cls.get("k", g(j)))
    Q = MetaQ(p, cls["s"])
    eta = _frac(config["eta"])
    m = config["m"]
    prior_p, prior_q = PowerOf(p, m), MetaPower(Q, m)
    k_add = config.get("k_add", 2)
    addk = UniversalAdditiveConfig(k_add, prior_p, prior_q, eta) if eta < Fraction(1, 2 * k_add) else None
    return DeskSetup(p, Q, g, eta, m, k_add, prior_p, prior_q, addk,
                     _frac(config.get("alpha", 1)), _frac(config.get("gamma_prime", 0)))


def candidate_pool(setup: DeskSetup, seed: int, n: int) -> list[CgParams]:
    """``[p, q_1, ..., q_n]`` drawn once, before any trial data, with sets materialised."""
    rng = RandomSource(seed, (CANDIDATES,))
    pool = [setup.p]
    for _ in range(n):
        q = sample_q(setup.Q, rng)
        if isinstance(q.B, LazySubset):
            q = CgParams(q.B.materialise().build_bitmap(), q.j, q.k)
        pool.append(q)
    return pool


CHANNELS = ("sub", "pair", "addk")
FEATURE_NAMES = tuple(FEATURES)


def desk_trial(setup: DeskSetup, seed: int, side: int, t: int, threshold: Fraction | None = None,
               candidates: list[CgParams] | None = None) -> dict:
    """One paired trial on one side: clean sample, then every channel on it.

    All channels share the clean sample and its subtractive output.  When
    ``threshold`` is given the learners are also run on the subtractive and
    universal additive outputs and their failures recorded.
    """
    rng = RandomSource(seed, (side, t))
    truth = setup.p if side == SIDE_P else sample_q(setup.Q, rng)
    S = truth.sample(setup.m, rng)
    S_sub = v_sub(S, setup.eta, rng)
    other = setup.prior_q if side == SIDE_P else setup.prior_p
    outs = {"sub": S_sub, "pair": add_from_sub(S, S_sub, other, setup.eta, rng, "pad")}
    rec = {"side": "p" if side == SIDE_P else "Q", "trial": t,
           "clean_indicators": S.count_kind(INDICATOR),
           "clean_repeat": FEATURES["repeated-odds"](S)}
    if setup.addk is not None:
        outs["addk"], rec["u"] = add_k_from_sub(S, S_sub, setup.addk, rng, "pad", with_u=True)
    for ch, out in outs.items():
        rec[f"{ch}_size"] = out.size
        for fname, feat in FEATURES.items():
            rec[f"{ch}:{fname}"] = feat(out)
    if threshold is not None:
        for ch in ("sub", "addk"):
            if ch not in outs:
                continue
            learned = realizable_learner(outs[ch], setup.g)
            rec[f"{ch}:realizable_fail"] = int(distance(learned.estimate, truth) > threshold)
            if candidates is not None:
                learned = min_distance_learner(outs[ch], candidates)
                rec[f"{ch}:min_distance_fail"] = int(distance(learned.estimate, truth) > threshold)
    return rec


def control_trial(setup: DeskSetup, seed: int, side: int, t: int, m: int, threshold: Fraction) -> int:
    """Realizable learner on an uncorrupted sample; 1 if it misses by more than ``threshold``."""
    rng = RandomSource(seed, (side, t))
    truth = setup.p if side == CONTROL_P else sample_q(setup.Q, rng)
    learned = realizable_learner(truth.sample(m, rng), setup.g)
    return int(distance(learned.estimate, truth) > threshold)


_SIM_CACHE: dict = {}


def simulate_desk(config: dict, seed: int, n: int, n_learn: int = 0) -> dict:
    """Run ``n`` paired trials per side; learners run on the first ``n_learn``.

    Results are memoised per process on (config, seed, n, n_learn) so the
    confusion and failure runs of one session share their trials.
    """
    key = (config_hash(config), seed, n, n_learn)
    if key in _SIM_CACHE:
        return _SIM_CACHE[key]
    setup = desk_setup(config)
    cert = None
    threshold = None
    if n_learn:
        cert = confusion_certificate(setup.p, setup.Q, setup.eta, setup.alpha, setup.gamma_prime, setup.m)
        threshold = cert.gamma / 2
    cands = candidate_pool(setup, seed, config.get("candidates", 10)) if n_learn else None
    records = {SIDE_P: [], SIDE_Q: []}
    for side in (SIDE_P, SIDE_Q):
        for t in range(n):
            learn = t < n_learn
            records[side].append(desk_trial(setup, seed, side, t, threshold if learn else None,
                                            cands if learn else None))
    result = {"setup": setup, "records": records, "certificate": cert}
    _SIM_CACHE[key] = result
    return result


def _certify(setup: DeskSetup):
    """Certificate and its two verdict lines (or the rejection)."""
    try:
        cert = confusion_certificate(setup.p, setup.Q, setup.eta, setup.alpha, setup.gamma_prime, setup.m)
    except CertificateRejected as exc:
        return None, [check(f"certificate: {exc.inequality}", exc.lhs, "<", exc.rhs)]
    return cert, [
        check("condition 1: gamma = 4 alpha eta + 4 gamma' < (1/j - 1/k)/2", cert.gamma, "<", cert.separation),
        check("condition 2: zeta_ub = 2 birthday + 2/(k eta) < 1/2", cert.zeta, "<", 0.5),
    ]


def confusion_report(config: dict, sim: dict) -> RunReport:
    setup: DeskSetup = sim["setup"]
    rp, rq = sim["records"][SIDE_P], sim["records"][SIDE_Q]
    n = len(rp)
    report = RunReport("confuse", config)
    b = setup.budget
    if setup.eta == 0:
        report.summary = {"note": "eta = 0: every channel is the identity"}
        for ch in CHANNELS:
            for fname in FEATURE_NAMES:
                key = f"{ch}:{fname}"
                if key not in rp[0]:
                    continue
                est = advantage_from_features([r[key] for r in rp], [r[key] for r in rq], key)
                report.verdicts.append(check(f"{key} advantage (no corruption)", est.estimate, "<=", 1.0,
                                             informative=True))
        return report
    cert, lines = _certify(setup)
    report.verdicts += lines
    if cert is None:
        return report
    zeta = cert.zeta
    k_add = setup.k_add
    caps = {"sub": zeta, "pair": zeta, "addk": zeta + 1 / (k_add + 1)}
    adv = {}
    for ch in CHANNELS:
        if f"{ch}:{FEATURE_NAMES[0]}" not in rp[0]:
            continue
        for fname in FEATURE_NAMES:
            key = f"{ch}:{fname}"
            est = advantage_from_features([r[key] for r in rp], [r[key] for r in rq], key)
            adv[key] = est
            rhs = caps[ch] + 3 * est.se
            v = check(f"{ch} channel, {fname} advantage <= cap + 3 se", est.estimate, "<=", rhs)
            report.verdicts.append(v)
            report.estimates.append({"name": key, "estimate": est.estimate, "se": est.se, "n": est.n,
                                     "bound": caps[ch], "verdict": v["verdict"]})
    for fname in FEATURE_NAMES:
        a, s = adv.get(f"pair:{fname}"), adv.get(f"sub:{fname}")
        if a is None or s is None:
            continue
        se = math.sqrt(a.se ** 2 + s.se ** 2)
        report.verdicts.append(check(f"transfer, {fname}: pair advantage <= sub advantage + 3 se",
                                     a.estimate, "<=", s.estimate + 3 * se))
    sizes_ok = {
        "sub": all(r["sub_size"] == setup.m - b for r in rp + rq),
        "pair": all(r["pair_size"] == setup.m + b for r in rp + rq),
    }
    report.verdicts.append(check("sub output size == m - floor(eta m) on every trial",
                                 int(sizes_ok["sub"]), "==", 1))
    report.verdicts.append(check("pair output size == m + floor(eta m) on every trial",
                                 int(sizes_ok["pair"]), "==", 1))
    if setup.addk is not None:
        ok = all(r["addk_size"] == setup.m + k_add * b for r in rp + rq)
        report.verdicts.append(check("addk output size == m + k floor(eta m) on every trial",
                                     int(ok), "==", 1))
    # the two bound terms against their empirical frequencies
    s = setup.Q.subset_size
    bday = birthday_bound(setup.m, s)
    for label, recs in (("p", rp), ("Q", rq)):
        f = sum(r["clean_repeat"] for r in recs) / n
        report.verdicts.append(check(f"repeated odds under {label}^m <= birthday + 3 se",
                                     f, "<=", bday + 3 * binomial_se(f, n)))
    tail = sum(r["clean_indicators"] > b for r in rp) / n + sum(r["clean_indicators"] > b for r in rq) / n
    tail_se = math.sqrt(sum(binomial_se(sum(r["clean_indicators"] > b for r in recs) / n, n) ** 2
                            for recs in (rp, rq)))
    markov = markov_indicator_bound(setup.p.k, setup.eta)
    report.verdicts.append(check("indicator tails beyond budget (both laws) <= 2/(k eta) + 3 se",
                                 tail, "<=", markov + 3 * tail_se))
    report.summary = {
        "certificate": cert.to_json(),
        "zeta_ub": zeta, "birthday": bday, "markov": markov, "budget": b,
        "caps": caps, "trials_per_side": n,
        "advantages": {k: v.to_json() for k, v in adv.items()},
    }
    report.row_fields = sorted({k for r in rp[:1] for k in r if not k.endswith("_fail")},
                               key=_field_order)
    report.rows = [r for pair in zip(rp, rq) for r in pair]
    return report


def _field_order(name: str):
    order = ["side", "trial", "u", "clean_indicators", "clean_repeat"]
    return (order.index(name) if name in order else len(order), name)


def run_confusion(config: dict, seed: int | None = None, trials: int | None = None) -> RunReport:
    t0 = time.perf_counter()
    seed = config.get("seed", 0) if seed is None else seed
    n = config.get("trials", 100_000) if trials is None else trials
    sim = simulate_desk(config, seed, n, 0)
    report = confusion_report(config | {"seed": seed, "trials": n}, sim)
    report.wall_time = time.perf_counter() - t0
    return report


def failure_report(config: dict, sim: dict, n_learn: int, control: dict) -> RunReport:
    cert = sim["certificate"]
    report = RunReport("failure", config)
    rp = sim["records"][SIDE_P][:n_learn]
    rq = sim["records"][SIDE_Q][:n_learn]
    floor = 1 - cert.zeta
    sums = {}
    for ch in ("sub", "addk"):
        for learner in ("realizable", "min_distance"):
            key = f"{ch}:{learner}_fail"
            if key not in rp[0]:
                continue
            fp = sum(r[key] for r in rp) / len(rp)
            fq = sum(r[key] for r in rq) / len(rq)
            se = math.sqrt(binomial_se(fp, len(rp)) ** 2 + binomial_se(fq, len(rq)) ** 2)
            sums[key] = {"f_p": fp, "f_Q": fq, "sum": fp + fq, "se": se}
            report.verdicts.append(check(f"{learner} under {ch}: f_p + f_Q >= 1 - zeta_ub - 3 se",
                                         fp + fq, ">=", floor - 3 * se))
            report.estimates.append({"name": key, "estimate": fp + fq, "se": se, "n": len(rp),
                                     "bound": floor, "verdict": report.verdicts[-1]["verdict"]})
    cp, cq = control["p"], control["Q"]
    csum = sum(cp) / len(cp) + sum(cq) / len(cq)
    report.verdicts.append(check(f"no-adversary control at m={control['m']}: realizable f_p + f_Q <= 0.05",
                                 csum, "<=", 0.05))
    report.summary = {
        "certificate": cert.to_json(), "threshold": float(cert.gamma / 2),
        "failure_floor_sum": floor, "failure_floor_single": cert.failure_floor,
        "rates": sums, "trials_per_side": n_learn,
        "control": {"m": control["m"], "f_p": sum(cp) / len(cp), "f_Q": sum(cq) / len(cq),
                    "trials_per_side": len(cp)},
    }
    report.row_fields = ["side", "trial"] + sorted(k for k in rp[0] if k.endswith("_fail"))
    report.rows = [r for pair in zip(rp, rq) for r in pair]
    return report


def control_runs(config: dict, seed: int, n: int) -> dict:
    """Uncorrupted runs at a sample size where the realizable learner should succeed."""
    setup = desk_setup(config)
    cert = confusion_certificate(setup.p, setup.Q, setup.eta, setup.alpha, setup.gamma_prime, setup.m)
    m = config.get("control_m") or math.ceil(math.log(100) * setup.p.k)
    thr = cert.gamma / 2
    return {"m": m,
            "p": [control_trial(setup, seed, CONTROL_P, t, m, thr) for t in range(n)],
            "Q": [control_trial(setup, seed, CONTROL_Q, t, m, thr) for t in range(n)]}


def run_failure(config: dict, seed: int | None = None, trials: int | None = None) -> RunReport:
    t0 = time.perf_counter()
    seed = config.get("seed", 0) if seed is None else seed
    n = config.get("failure_trials", 5000) if trials is None else trials
    setup = desk_setup(config)
    try:
        confusion_certificate(setup.p, setup.Q, setup.eta, setup.alpha, setup.gamma_prime, setup.m)
    except CertificateRejected as exc:
        report = RunReport("failure", config | {"seed": seed})
        report.verdicts.append(check(f"certificate: {exc.inequality}", exc.lhs, "<", exc.rhs))
        return report
    sim = simulate_desk(config, seed, n, n)
    report = failure_report(config | {"seed": seed, "failure_trials": n}, sim, n,
                            control_runs(config, seed, n))
    report.wall_time = time.perf_counter() - t0
    return report


# -- realizable learnability ----------------------------------------------

def realizable_trial(g: GFunction, eps: float, m: int, seed: int, cell: int, t: int) -> dict:
    rng = RandomSource(seed, (REALIZABLE, cell, t))
    J = math.ceil(1 / eps)
    truth = random_member(rng, g, (2, J))
    learned = realizable_learner(truth.sample(m, rng), g)
    err = distance(learned.estimate, truth)
    return {"j": truth.j, "error": float(err), "success": int(err <= Fraction(repr(eps)))}


def run_realizable(config: dict, seed: int | None = None, trials: int | None = None) -> RunReport:
    t0 = time.perf_counter()
    rc = config.get("realizable", {})
    seed = config.get("seed", 0) if seed is None else seed
    n = rc.get("trials", 10_000) if trials is None else trials
    g = GFunction.from_json(rc.get("g", "square"))
    grid = rc.get("grid", [[0.1, 0.01], [0.1, 0.05], [0.25, 0.01], [0.25, 0.05]])
    report = RunReport("realizable", config | {"seed": seed})
    report.row_fields = ["eps", "delta", "m", "trial", "j", "error", "success"]
    cells = []
    for cell, (eps, delta) in enumerate(grid):
        m = rc.get("m") if rc.get("m") is not None else realizable_sample_complexity(eps, delta, g)
        rows = [realizable_trial(g, eps, m, seed, cell, t) for t in range(n)]
        freq = sum(r["success"] for r in rows) / n
        J = math.ceil(1 / eps)
        # analytic success: only members with 1/j > eps can fail, when no indicator shows
        analytic = sum(1 - ((1 - Fraction(1, g(j))) ** m if Fraction(1, j) > Fraction(repr(eps)) else 0)
                       for j in range(2, J + 1)) / (J - 1)
        se = binomial_se(1 - delta, n)
        report.verdicts.append(check(f"eps={eps}, delta={delta}, m={m}: success >= 1 - delta - 3 se",
                                     freq, ">=", 1 - delta - 3 * se))
        cells.append({"eps": eps, "delta": delta, "m": m, "success": freq, "analytic": float(analytic),
                      "se": se})
        report.estimates.append({"name": f"eps={eps},delta={delta}", "estimate": freq, "se": se, "n": n,
                                 "bound": 1 - delta, "verdict": report.verdicts[-1]["verdict"]})
        report.rows += [{"eps": eps, "delta": delta, "m": m, "trial": t, **r} for t, r in enumerate(rows)]
    report.summary = {"cells": cells, "trials": n, "g": g.to_json()}
    report.wall_time = time.perf_counter() - t0
    return report


# -- inversion round trip ---------------------------------------------------

def run_invert_check(config: dict, seed: int | None = None, trials: int | None = None) -> RunReport:
    """Exact round trip and posterior agreement on every micro instance."""
    t0 = time.perf_counter()
    ic = config.get("invert", {})
    report = RunReport("invert-check", config)
    instances = oracle.micro_instances()
    limit = ic.get("instances")
    if limit:
        instances = instances[:limit]
    rows = []
    for name, prior, eta in instances:
        tv = oracle.round_trip_tv(prior, eta)
        rows.append({"instance": name, "round_trip_tv": str(tv)})
        report.verdicts.append(check(f"round trip {name}: exact TV == 0", tv, "==", 0))
    if ic.get("posterior_agreement", True):
        for name, prior, eta in instances[:: max(1, len(instances) // 12)]:
            tv = oracle.posterior_agreement(prior, eta)
            report.verdicts.append(check(f"structured vs brute-force posterior {name}: TV == 0", tv, "==", 0))
    report.row_fields = ["instance", "round_trip_tv"]
    report.rows = rows
    report.summary = {"instances": len(instances), "exact": True}
    report.wall_time = time.perf_counter() - t0
    return report


# -- oblivious lift -----------------------------------------------------------

def lift_setup(lc: dict):
    """``p`` a tabulated member and ``r`` the deletion law, both exact."""
    params = CgParams(FiniteSet(lc.get("B", [1, 2, 3, 4])), lc.get("j", 2), lc.get("k", 4))
    p = make_distribution(params)
    # r moves mass off the indicator and the constant, as a subtractive oblivious adversary would
    r_ind = _frac(lc.get("r_indicator", Fraction(1, 2)))
    r = FiniteDistribution({params.indicator: r_ind, CONST_ELEMENT: 1 - r_ind})
    return params, p, r


def run_lift_check(config: dict, seed: int | None = None, trials: int | None = None) -> RunReport:
    t0 = time.perf_counter()
    lc = config.get("lift", {})
    seed = config.get("seed", 0) if seed is None else seed
    n = lc.get("trials", 100_000) if trials is None else trials
    eta = _frac(lc.get("eta", Fraction(1, 5)))
    m = lc.get("m", 10)
    params, p, r = lift_setup(lc)
    report = RunReport("lift-check", config | {"seed": seed})
    pf, rf = p.as_float(), r.as_float()
    fe = float(eta)
    # aggregate deletion probability over single draws x ~ p
    rng = RandomSource(seed, (LIFT, 0))
    support = pf.support()
    idx = rng.generator.choice(len(support), size=n, p=[pf[e] for e in support])
    probs = np.array([fe * rf[e] / pf[e] for e in support])[idx]
    deleted = rng.generator.random(n) < probs
    freq = float(deleted.mean())
    se5 = 5 * math.sqrt(fe * (1 - fe) / n)
    report.verdicts.append(check("aggregate deletion frequency within 5 sigma of eta: |freq - eta|",
                                 abs(freq - fe), "<=", se5))
    # case 2 frequency on full samples
    case2 = 0
    target = m - ceil_count(eta, m)
    sizes_ok = True
    for t in range(n):
        src = RandomSource(seed, (LIFT, 1, t))
        S = pf.sample_iid(m, src)
        out, case = v_adp_lift(S, pf, rf, fe, src, with_case=True)
        case2 += case == 2
        sizes_ok &= out.size == target and out.issubset(S)
    f2 = case2 / n
    report.verdicts.append(check("case 2 frequency >= 1/2 - 3 se", f2, ">=", 0.5 - 3 * binomial_se(f2, n)))
    report.verdicts.append(check("lift output size == m - ceil(eta m) and output within S",
                                 int(sizes_ok), "==", 1))
    exact_rows = []
    for mm in lc.get("exact_m", [1, 2, 3]):
        tv, p2 = oracle.lift_case2_tv(p, r, eta, mm)
        report.verdicts.append(check(f"m={mm}: case-2 conditional law vs V_obl(p)^target, exact TV == 0",
                                     tv, "==", 0))
        report.verdicts.append(check(f"m={mm}: exact P(case 2) >= 1/2", p2, ">=", Fraction(1, 2)))
        tvq = oracle.deletion_product_tv(p, r, eta, mm)
        report.verdicts.append(check(f"m={mm}: point-wise marking vs q^m, exact TV == 0", tvq, "==", 0))
        exact_rows.append({"m": mm, "case2_tv": str(tv), "p_case2": str(p2), "marking_tv": str(tvq)})
    report.summary = {"eta": float(eta), "deletion_frequency": freq, "case2_frequency": f2,
                      "m": m, "target": target, "trials": n, "exact": exact_rows}
    report.wall_time = time.perf_counter() - t0
    return report


# -- uniform-subsets example ----------------------------------------------------

def example_b_sizes(m: int, zeta: float) -> tuple[int, int]:
    """``(|B|, s)`` with ``s = ceil(m / (1 - (1 - zeta)^(1/m)))`` and ``|B| = 2^m s``."""
    s = math.ceil(m / -math.expm1(math.log1p(-zeta) / m))
    return (2 ** m) * s, s


def _uniform_sample(B, m: int, rng) -> Sample:
    counts: dict = {}
    for x in B.draw(rng, m):
        e = odd(x, 1)
        counts[e] = counts.get(e, 0) + 1
    return Sample._raw(counts)


def run_example_b(config: dict, seed: int | None = None, trials: int | None = None) -> RunReport:
    t0 = time.perf_counter()
    ec = config.get("example_b", {})
    seed = config.get("seed", 0) if seed is None else seed
    n = ec.get("trials", 100_000) if trials is None else trials
    m, zeta = ec.get("m", 5), ec.get("zeta", 0.1)
    size, s = example_b_sizes(m, zeta)
    if ec.get("s") is not None:
        s = ec["s"]
    B = IntervalSet(0, size - 1)
    report = RunReport("example-b", config | {"seed": seed})
    fa, fb = [], []
    for t in range(n):
        rng = RandomSource(seed, (EXAMPLE_B, 0, t))
        fa.append(repeated_elements(_uniform_sample(B, m, rng)))
        rng = RandomSource(seed, (EXAMPLE_B, 1, t))
        sub = B if s == size else _random_subset(B, s, rng)
        fb.append(repeated_elements(_uniform_sample(sub, m, rng)))
    est = advantage_from_features(fa, fb, "repeated-elements")
    separation = 1 - Fraction(s, size)
    bday = birthday_bound(m, s)
    informative = s == size
    report.verdicts.append(check("repeated-element advantage <= zeta + 3 se", est.estimate, "<=",
                                 zeta + 3 * est.se, informative=informative))
    report.verdicts.append(check("birthday term at the example's size <= zeta", bday, "<=", zeta,
                                 informative=informative))
    report.verdicts.append(check("exact TV(U_B, U_B') == 1 - 2^-m", separation, "==",
                                 1 - Fraction(1, 2 ** m), informative=informative))
    report.summary = {"m": m, "zeta": zeta, "B_size": size, "s": s, "advantage": est.to_json(),
                      "separation": str(separation), "birthday": bday,
                      "repeat_freq_p": sum(fa) / n, "repeat_freq_Q": sum(fb) / n}
    report.estimates.append({"name": "repeated-elements", "estimate": est.estimate, "se": est.se,
                             "n": n, "bound": zeta, "verdict": report.verdicts[0]["verdict"]})
    report.wall_time = time.perf_counter() - t0
    return report


def _random_subset(B, s: int, rng):
    if B.size <= 4096:
        members = B.members()
        return FiniteSet(int(members[i]) for i in rng.sample_indices(B.size, s))
    return LazySubset(B, s, rng.child())


# -- planner dump -----------------------------------------------------------------

def run_params(config: dict, seed: int | None = None, trials: int | None = None) -> RunReport:
    t0 = time.perf_counter()
    pc = config.get("planner", {})
    alpha = _frac(pc.get("alpha", 1))
    g = GFunction.from_json(pc.get("g", "square"))
    m = pc.get("m", 2)
    plan = plan_parameters(alpha, g, m)
    report = RunReport("params", config)
    report.verdicts.append(check("planner: (1/j - 1/g(j))/2 >= 4 alpha eta + 4 gamma'",
                                 plan.separation, ">=", plan.gamma))
    exact = bool(config.get("exact"))
    if exact:
        zeta_exact = min(Fraction(1), 2 * birthday_bound(m, plan.n_required, exact=True) + plan.markov)
        report.verdicts.append(check("planner: 2 birthday + 2/(k eta) <= 1/8 (exact)",
                                     zeta_exact, "<=", Fraction(1, 8)))
    else:
        report.verdicts.append(check("planner: 2 birthday + 2/(k eta) <= 1/8", plan.zeta_ub, "<=", 0.125))
    summary = {"planner": plan.to_json()}
    if exact:
        summary["planner"]["zeta_ub_exact"] = str(zeta_exact)
    if "class" in config:
        setup = desk_setup(config)
        summary["desk"] = {
            "zeta_ub": tv_upper_bound_decomposition(setup.p, setup.Q, setup.m, setup.eta),
            "birthday": birthday_bound(setup.m, setup.Q.subset_size),
            "markov": markov_indicator_bound(setup.p.k, setup.eta),
            "separation": float((Fraction(1, setup.p.j) - Fraction(1, setup.p.k)) / 2),
            "gamma": float(4 * setup.alpha * setup.eta + 4 * setup.gamma_prime),
            "budget": setup.budget,
        }
        if exact:
            summary["desk"]["exact"] = {
                "zeta_ub": str(tv_upper_bound_decomposition(setup.p, setup.Q, setup.m, setup.eta, exact=True)),
                "markov": str(markov_indicator_bound(setup.p.k, setup.eta, exact=True)),
                "separation": str((Fraction(1, setup.p.j) - Fraction(1, setup.p.k)) / 2),
                "gamma": str(4 * setup.alpha * setup.eta + 4 * setup.gamma_prime),
            }
    report.summary = summary
    report.wall_time = time.perf_counter() - t0
    return report


RUNNERS = {
    "realizable": run_realizable,
    "confuse": run_confusion,
    "failure": run_failure,
    "invert-check": run_invert_check,
    "lift-check": run_lift_check,
    "example-b": run_example_b,
    "params": run_params,
}
