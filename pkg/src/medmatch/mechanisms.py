"""The two allocation mechanisms: random serial pairing and deferred acceptance.

Both operate per category (categories are independent sub-markets) and
return a Matching plus TraceStats counters. The deferred-acceptance
mechanism is fully deterministic; the randomized one derives a dedicated
RNG stream per (seed, category) so categories could be processed in any
order with identical results.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .market import (
    DOCTOR,
    PATIENT,
    AgentId,
    CategoryMarket,
    InvalidMarketError,
    Market,
    opposite,
    validate_market,
)

RAMHECS = "ramhecs"
TOMHECS = "tomhecs"
MECHANISMS = (RAMHECS, TOMHECS)


@dataclass
class CategoryTrace:
    category: int
    proposals: int = 0
    rejections: int = 0
    outer_iterations: int = 0


@dataclass
class TraceStats:
    per_category: list[CategoryTrace] = field(default_factory=list)
    # (kind, round, proposer, receiver) tuples when tracing is requested;
    # kind is "propose", "hold", or "reject".
    events: list[tuple] | None = None

    @property
    def proposals(self) -> int:
        return sum(t.proposals for t in self.per_category)

    @property
    def rejections(self) -> int:
        return sum(t.rejections for t in self.per_category)

    @property
    def outer_iterations(self) -> int:
        return sum(t.outer_iterations for t in self.per_category)

    def for_category(self, index: int) -> CategoryTrace:
        for t in self.per_category:
            if t.category == index:
                return t
        raise KeyError(index)


@dataclass
class Matching:
    """Per-category sets of (patient, doctor) pairs."""

    by_category: dict[int, frozenset[tuple[AgentId, AgentId]]]

    def pairs(self, category: int) -> frozenset[tuple[AgentId, AgentId]]:
        return self.by_category[category]

    def as_maps(self, category: int) -> tuple[dict[AgentId, AgentId], dict[AgentId, AgentId]]:
        patient_to_doctor = {}
        doctor_to_patient = {}
        for p, d in self.by_category[category]:
            patient_to_doctor[p] = d
            doctor_to_patient[d] = p
        return patient_to_doctor, doctor_to_patient

    def matched_count(self, category: int) -> int:
        return len(self.by_category[category])


def _require_valid(market: Market) -> None:
    violations = validate_market(market)
    if violations:
        raise InvalidMarketError("; ".join(violations))


def _ordinal_prefs(cm: CategoryMarket, side: str) -> list[list[int]]:
    return [[e.ordinal for e in pl.ranking] for pl in cm.prefs(side)]


def _rank_tables(cm: CategoryMarket, side: str) -> list[dict[int, int]]:
    return [
        {e.ordinal: r for r, e in enumerate(pl.ranking)} for pl in cm.prefs(side)
    ]


def ramhecs_category(
    cm: CategoryMarket, rng: random.Random
) -> tuple[frozenset[tuple[AgentId, AgentId]], CategoryTrace]:
    """Randomized pairing: random unmatched patient, random available listed doctor."""
    trace = CategoryTrace(cm.category)
    prefs = _ordinal_prefs(cm, PATIENT)
    # Mutual acceptability: a doctor is only a candidate for patients it lists.
    doctor_lists = [set(e.ordinal for e in pl.ranking) for pl in cm.doctor_prefs]
    available = set(range(len(cm.doctors)))
    active = list(range(len(cm.patients)))
    pairs = []
    while active:
        trace.outer_iterations += 1
        pos = rng.randrange(len(active))
        t = active[pos]
        candidates = [d for d in prefs[t] if d in available and t in doctor_lists[d]]
        if not candidates:
            # Exhausted patient (partial lists): stays permanently unmatched.
            active.pop(pos)
            continue
        d = rng.choice(candidates)
        trace.proposals += 1
        pairs.append((cm.patients[t], cm.doctors[d]))
        active.pop(pos)
        available.remove(d)
    return frozenset(pairs), trace


def ramhecs(market: Market, seed: int | str = 0) -> tuple[Matching, TraceStats]:
    """Randomized baseline mechanism; deterministic per seed."""
    _require_valid(market)
    by_category = {}
    stats = TraceStats()
    for cm in market.categories:
        rng = random.Random(f"{seed}:ramhecs:{cm.category}")
        pairs, trace = ramhecs_category(cm, rng)
        by_category[cm.category] = pairs
        stats.per_category.append(trace)
    return Matching(by_category), stats


def tomhecs_category(
    cm: CategoryMarket,
    proposing_side: str = PATIENT,
    events: list[tuple] | None = None,
) -> tuple[frozenset[tuple[AgentId, AgentId]], CategoryTrace]:
    """Deferred acceptance within one category, batch proposal order.

    Every free proposer proposes to its most-preferred counterpart not yet
    approached; each counterpart keeps the best proposer it has seen (per
    its own list) and rejects the rest. A proposer absent from the
    counterpart's list is rejected immediately. Terminates when every free
    proposer has exhausted its list.
    """
    trace = CategoryTrace(cm.category)
    proposers = cm.roster(proposing_side)
    receivers = cm.roster(opposite(proposing_side))
    prefs = _ordinal_prefs(cm, proposing_side)
    ranks = _rank_tables(cm, opposite(proposing_side))

    next_choice = [0] * len(proposers)
    engaged_to: list[int | None] = [None] * len(proposers)  # receiver held by proposer
    holder: list[int | None] = [None] * len(receivers)  # proposer held by receiver

    while True:
        offers: dict[int, list[int]] = {}
        proposed = False
        for p in range(len(proposers)):
            if engaged_to[p] is not None or next_choice[p] >= len(prefs[p]):
                continue
            r = prefs[p][next_choice[p]]
            next_choice[p] += 1
            proposed = True
            trace.proposals += 1
            if events is not None:
                events.append(
                    ("propose", trace.outer_iterations + 1, proposers[p], receivers[r])
                )
            if p not in ranks[r]:
                # Receiver does not list this proposer: immediate rejection.
                trace.rejections += 1
                if events is not None:
                    events.append(
                        ("reject", trace.outer_iterations + 1, proposers[p], receivers[r])
                    )
                continue
            offers.setdefault(r, []).append(p)
        if not proposed:
            break
        trace.outer_iterations += 1
        for r, candidates in offers.items():
            if holder[r] is not None:
                candidates.append(holder[r])
            best = min(candidates, key=ranks[r].__getitem__)
            for c in candidates:
                if c == best:
                    continue
                trace.rejections += 1
                engaged_to[c] = None
                if events is not None:
                    events.append(
                        ("reject", trace.outer_iterations, proposers[c], receivers[r])
                    )
            if holder[r] != best:
                holder[r] = best
                engaged_to[best] = r
                if events is not None:
                    events.append(
                        ("hold", trace.outer_iterations, proposers[best], receivers[r])
                    )

    pairs = []
    for p, r in enumerate(engaged_to):
        if r is None:
            continue
        if proposing_side == PATIENT:
            pairs.append((proposers[p], receivers[r]))
        else:
            pairs.append((receivers[r], proposers[p]))
    return frozenset(pairs), trace


def tomhecs(
    market: Market, proposing_side: str = PATIENT, record_trace: bool = False
) -> tuple[Matching, TraceStats]:
    """Deferred acceptance over every category; deterministic, no randomness."""
    if proposing_side not in (PATIENT, DOCTOR):
        raise ValueError(f"unknown proposing side {proposing_side!r}")
    _require_valid(market)
    by_category = {}
    stats = TraceStats(events=[] if record_trace else None)
    for cm in market.categories:
        pairs, trace = tomhecs_category(cm, proposing_side, stats.events)
        by_category[cm.category] = pairs
        stats.per_category.append(trace)
    return Matching(by_category), stats


def run_mechanism(
    market: Market,
    mechanism: str,
    proposing_side: str = PATIENT,
    seed: int | str = 0,
) -> tuple[Matching, TraceStats]:
    """Uniform dispatch for the experiment harness."""
    if mechanism == RAMHECS:
        return ramhecs(market, seed)
    if mechanism == TOMHECS:
        return tomhecs(market, proposing_side)
    raise ValueError(f"unknown mechanism {mechanism!r}")
