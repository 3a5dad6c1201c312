"""Preference perturbation and Monte Carlo estimators for the expectation models.

The estimators simulate the stylized probability models (uniform first-pick
index, independent geometric rejections) and the randomized mechanism's
concrete dynamics; each converges to a known closed form that the tests pin
at three standard errors.
"""

from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass, replace

import numpy as np

from .market import DOCTOR, PATIENT, Market, PreferenceList

PRESET_PROBABILITIES = {
    "none": 0.0,
    "small": 1 / 8,
    "medium": 1 / 4,
    "large": 1 / 2,
}
PRESETS = tuple(PRESET_PROBABILITIES)


@dataclass(frozen=True)
class PerturbationSpec:
    side: str
    q: float
    seed: int | str = 0

    def __post_init__(self):
        if self.side not in (PATIENT, DOCTOR):
            raise ValueError(f"unknown side {self.side!r}")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError(f"deviation probability {self.q} outside [0, 1]")

    @classmethod
    def from_preset(cls, side: str, preset: str, seed: int | str = 0) -> "PerturbationSpec":
        return cls(side, PRESET_PROBABILITIES[preset], seed)


@dataclass
class EstimateResult:
    mean: float
    trials: int
    std_error: float
    params: dict


def perturb_preferences(market: Market, spec: PerturbationSpec) -> Market:
    """Independently per agent on spec.side, with probability q replace its
    ranking by a fresh uniform permutation of the same entries. Deterministic
    per seed; q=0 returns the input unchanged.
    """
    if spec.q == 0.0:
        return market
    categories = []
    for cm in market.categories:
        rng = random.Random(f"{spec.seed}:perturb:{cm.category}")
        lists = []
        for plist in cm.prefs(spec.side):
            if rng.random() < spec.q:
                lists.append(
                    PreferenceList(
                        plist.owner, tuple(rng.sample(plist.ranking, len(plist.ranking)))
                    )
                )
            else:
                lists.append(plist)
        if spec.side == PATIENT:
            categories.append(replace(cm, patient_prefs=tuple(lists)))
        else:
            categories.append(replace(cm, doctor_prefs=tuple(lists)))
    return replace(market, categories=tuple(categories))


def _summarize(samples, params) -> EstimateResult:
    mean = statistics.fmean(samples)
    se = statistics.stdev(samples) / math.sqrt(len(samples)) if len(samples) > 1 else 0.0
    return EstimateResult(mean, len(samples), se, params)


def estimate_first_pick_distance(
    n: int, trials: int, seed: int | str = 0
) -> EstimateResult:
    """Sample mean distance of a uniformly random pick from the top of an
    n-entry list; converges to (n-1)/2.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(f"{seed}:first-pick")
    samples = [rng.randrange(n) for _ in range(trials)]
    return _summarize(samples, {"n": n, "model": "uniform-pick"})


def estimate_total_distance(
    n: int, trials: int, seed: int | str = 0, model: str = "mechanism"
) -> EstimateResult:
    """Sample mean of the total original-list distance over all n patients.

    model="mechanism" replays the randomized mechanism's dynamics on random
    full balanced preference profiles (random patient order, random
    still-available listed doctor), scoring each patient by the chosen
    doctor's index in that patient's original list. model="stylized" draws
    the pick index uniformly over the remaining-list length instead.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if model not in ("mechanism", "stylized"):
        raise ValueError(f"unknown model {model!r}")
    rng = random.Random(f"{seed}:total-distance")
    samples = []
    doctors = list(range(n))
    for _ in range(trials):
        if model == "stylized":
            samples.append(sum(rng.randrange(n - i) for i in range(n)))
            continue
        prefs = [rng.sample(doctors, n) for _ in range(n)]
        position = [{d: i for i, d in enumerate(pl)} for pl in prefs]
        available = set(doctors)
        pending = list(range(n))
        total = 0
        while pending:
            t = pending.pop(rng.randrange(len(pending)))
            choice = rng.choice([d for d in prefs[t] if d in available])
            available.remove(choice)
            total += position[t][choice]
        samples.append(total)
    return _summarize(samples, {"n": n, "model": model})


def simulate_geometric_rejections(
    p: float,
    horizon: int,
    trials: int,
    seed: int = 0,
    agents: int = 1,
) -> EstimateResult:
    """Independent-rejection model: each agent accrues sum over k < horizon of
    Bernoulli(p^k) rejections; the trial value is the total over all agents.

    For one agent the mean converges to the geometric series sum, i.e.
    1/(1-p) as horizon grows; for n agents to n/(1-p).
    """
    if not 0.0 <= p < 1.0:
        raise ValueError(f"rejection probability {p} outside [0, 1)")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if agents < 1:
        raise ValueError("agents must be >= 1")
    rng = np.random.default_rng(seed)
    powers = p ** np.arange(horizon)
    totals = np.empty(trials)
    chunk = max(1, (1 << 22) // (agents * horizon))
    for start in range(0, trials, chunk):
        count = min(chunk, trials - start)
        draws = rng.random((count, agents, horizon)) < powers
        totals[start : start + count] = draws.sum(axis=(1, 2))
    mean = float(totals.mean())
    se = float(totals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return EstimateResult(
        mean, trials, se, {"p": p, "horizon": horizon, "agents": agents}
    )
