"""Evaluation metrics: satisfaction level (eta) and first-choice count (zeta).

eta sums, over the measured side's agents, the 0-based rank gap between the
assigned counterpart and the top of the agent's own list; lower is better.
zeta counts the agents whose assigned counterpart is their first choice.
Both are computed per category and aggregated over all categories.
"""

from __future__ import annotations

from dataclasses import dataclass

from .market import DOCTOR, PATIENT, Market
from .mechanisms import Matching


@dataclass
class MetricsReport:
    side: str
    eta_by_category: dict[int, int]
    zeta_by_category: dict[int, int]

    @property
    def eta(self) -> int:
        return sum(self.eta_by_category.values())

    @property
    def zeta(self) -> int:
        return sum(self.zeta_by_category.values())


def _assignments(market, matching, side):
    for cm in market.categories:
        p_to_d, d_to_p = matching.as_maps(cm.category)
        partner_of = p_to_d if side == PATIENT else d_to_p
        yield cm, [
            (agent, plist, partner_of.get(agent))
            for agent, plist in zip(cm.roster(side), cm.prefs(side))
        ]


def satisfaction_level(
    market: Market, matching: Matching, side: str
) -> tuple[dict[int, int], int]:
    """Per-category eta and the aggregate over all categories.

    An unmatched agent contributes its full list length: one worse than its
    last-ranked choice.
    """
    per_category = {}
    for cm, rows in _assignments(market, matching, side):
        eta = 0
        for agent, plist, partner in rows:
            if partner is None:
                eta += len(plist.ranking)
                continue
            rank = plist.rank_of(partner)
            if rank is None:
                raise ValueError(
                    f"{agent!r} matched to {partner!r} absent from its list"
                )
            eta += rank
        per_category[cm.category] = eta
    return per_category, sum(per_category.values())


def preferable_allocation_count(
    market: Market, matching: Matching, side: str
) -> tuple[dict[int, int], int]:
    """Per-category zeta (first-choice allocations) and the aggregate."""
    per_category = {}
    for cm, rows in _assignments(market, matching, side):
        zeta = 0
        for agent, plist, partner in rows:
            if partner is None:
                continue
            rank = plist.rank_of(partner)
            if rank is None:
                raise ValueError(
                    f"{agent!r} matched to {partner!r} absent from its list"
                )
            if rank == 0:
                zeta += 1
        per_category[cm.category] = zeta
    return per_category, sum(per_category.values())


def metrics_report(market: Market, matching: Matching, side: str) -> MetricsReport:
    if side not in (PATIENT, DOCTOR):
        raise ValueError(f"unknown side {side!r}")
    eta_by_category, _ = satisfaction_level(market, matching, side)
    zeta_by_category, _ = preferable_allocation_count(market, matching, side)
    return MetricsReport(side, eta_by_category, zeta_by_category)
