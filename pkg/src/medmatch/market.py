"""Agents, categories, preference profiles, and market construction.

A market is a collection of independent categories. Within a category each
patient ranks some (or all) of the doctors and each doctor ranks some (or
all) of the patients. All types are immutable after construction.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

PATIENT = "patient"
DOCTOR = "doctor"
SIDES = (PATIENT, DOCTOR)

FULL = "full"
PARTIAL = "partial"
MODES = (FULL, PARTIAL)


class InvalidMarketError(ValueError):
    """A mechanism was handed a market that fails validation."""


class MarketFormatError(ValueError):
    """A serialized market document is malformed or violates the schema."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


def opposite(side: str) -> str:
    if side == PATIENT:
        return DOCTOR
    if side == DOCTOR:
        return PATIENT
    raise ValueError(f"unknown side {side!r}")


@dataclass(frozen=True)
class AgentId:
    """Identity of one patient or doctor within a market.

    The hospital label is opaque metadata and never influences matching.
    """

    side: str
    category: int
    ordinal: int
    hospital: str = ""

    @property
    def label(self) -> str:
        prefix = "p" if self.side == PATIENT else "d"
        return f"{prefix}{self.ordinal + 1}"

    def __repr__(self) -> str:
        return f"<{self.label}@c{self.category}>"


@dataclass(frozen=True)
class PreferenceList:
    """Strict ranking over opposite-side agents; index 0 is most preferred."""

    owner: AgentId
    ranking: tuple[AgentId, ...]

    def rank_of(self, agent: AgentId) -> int | None:
        try:
            return self.ranking.index(agent)
        except ValueError:
            return None


@dataclass(frozen=True)
class CategoryMarket:
    """One category's rosters and both preference profiles.

    Rosters may have unequal sizes; lists may cover a strict subset of the
    opposite roster.
    """

    category: int
    patients: tuple[AgentId, ...]
    doctors: tuple[AgentId, ...]
    patient_prefs: tuple[PreferenceList, ...]
    doctor_prefs: tuple[PreferenceList, ...]

    def roster(self, side: str) -> tuple[AgentId, ...]:
        return self.patients if side == PATIENT else self.doctors

    def prefs(self, side: str) -> tuple[PreferenceList, ...]:
        return self.patient_prefs if side == PATIENT else self.doctor_prefs


@dataclass(frozen=True)
class Market:
    categories: tuple[CategoryMarket, ...]
    mode: str = FULL


def _check_roster(cm: CategoryMarket, side: str, out: list[str]) -> None:
    roster = cm.roster(side)
    for pos, agent in enumerate(roster):
        where = f"category {cm.category} {side} roster position {pos}"
        if agent.side != side:
            out.append(f"{where}: agent {agent!r} has wrong side")
        if agent.category != cm.category:
            out.append(f"{where}: agent {agent!r} has wrong category")
        if agent.ordinal != pos:
            out.append(f"{where}: agent {agent!r} ordinal does not match position")


def _check_prefs(cm: CategoryMarket, side: str, mode: str, out: list[str]) -> None:
    roster = cm.roster(side)
    prefs = cm.prefs(side)
    counterpart = set(cm.roster(opposite(side)))
    if len(prefs) != len(roster):
        out.append(
            f"category {cm.category}: {len(roster)} {side}s but "
            f"{len(prefs)} preference lists"
        )
        return
    for agent, plist in zip(roster, prefs):
        if plist.owner != agent:
            out.append(f"{agent!r}: preference list owner mismatch ({plist.owner!r})")
            continue
        seen = set()
        for entry in plist.ranking:
            if entry in seen:
                out.append(f"{agent!r}: duplicate entry {entry!r}")
            seen.add(entry)
            if entry not in counterpart:
                out.append(f"{agent!r}: entry {entry!r} is not on the opposite roster")
        if mode == FULL and len(seen) < len(counterpart):
            out.append(
                f"{agent!r}: list covers {len(seen)} of {len(counterpart)} "
                "counterparts in full-preference mode"
            )


def validate_market(market: Market) -> list[str]:
    """Return all structural violations; an empty list means the market is valid."""
    violations: list[str] = []
    if market.mode not in MODES:
        violations.append(f"unknown mode {market.mode!r}")
    for pos, cm in enumerate(market.categories):
        if cm.category != pos:
            violations.append(
                f"category index {cm.category} at position {pos}: "
                "indices must be contiguous from 0"
            )
    for cm in market.categories:
        _check_roster(cm, PATIENT, violations)
        _check_roster(cm, DOCTOR, violations)
        _check_prefs(cm, PATIENT, market.mode, violations)
        _check_prefs(cm, DOCTOR, market.mode, violations)
    return violations


def category_from_rankings(
    category: int,
    patient_rankings: list[list[int]],
    doctor_rankings: list[list[int]],
    patient_hospitals: list[str] | None = None,
    doctor_hospitals: list[str] | None = None,
) -> CategoryMarket:
    """Build a CategoryMarket from ordinal ranking lists (0-based)."""
    n, m = len(patient_rankings), len(doctor_rankings)
    if patient_hospitals is None:
        patient_hospitals = [f"h{i + 1}" for i in range(n)]
    if doctor_hospitals is None:
        doctor_hospitals = [f"H{i + 1}" for i in range(m)]
    patients = tuple(
        AgentId(PATIENT, category, i, patient_hospitals[i]) for i in range(n)
    )
    doctors = tuple(
        AgentId(DOCTOR, category, j, doctor_hospitals[j]) for j in range(m)
    )
    patient_prefs = tuple(
        PreferenceList(patients[i], tuple(doctors[j] for j in patient_rankings[i]))
        for i in range(n)
    )
    doctor_prefs = tuple(
        PreferenceList(doctors[j], tuple(patients[i] for i in doctor_rankings[j]))
        for j in range(m)
    )
    return CategoryMarket(category, patients, doctors, patient_prefs, doctor_prefs)


def market_from_rankings(
    patient_rankings: list[list[int]],
    doctor_rankings: list[list[int]],
    mode: str = FULL,
    **kwargs,
) -> Market:
    """Single-category convenience wrapper around category_from_rankings."""
    cm = category_from_rankings(0, patient_rankings, doctor_rankings, **kwargs)
    return Market((cm,), mode)


def generate_random_market(
    k: int,
    n_patients: int,
    n_doctors: int,
    list_length: int | None = None,
    seed: int | str = 0,
) -> Market:
    """Generate a market with uniformly random preference lists.

    When list_length is None every agent ranks the entire opposite roster
    (full-preference mode); otherwise every agent ranks a uniformly random
    subset of exactly list_length counterparts, in uniformly random order.
    Identical seeds produce identical markets.
    """
    if k < 0 or n_patients < 0 or n_doctors < 0:
        raise ValueError("counts must be non-negative")
    if list_length is not None:
        if list_length > n_doctors or list_length > n_patients:
            raise ValueError(
                f"list_length {list_length} exceeds a roster size "
                f"({n_patients} patients, {n_doctors} doctors)"
            )
        if list_length < 0:
            raise ValueError("list_length must be non-negative")
    categories = []
    for ci in range(k):
        rng = random.Random(f"{seed}:gen:{ci}")
        patients = tuple(
            AgentId(PATIENT, ci, i, f"h{i + 1}") for i in range(n_patients)
        )
        doctors = tuple(AgentId(DOCTOR, ci, j, f"H{j + 1}") for j in range(n_doctors))
        # random.sample yields a uniformly random ordered subset: subset
        # choice and permutation in one draw.
        p_len = n_doctors if list_length is None else list_length
        d_len = n_patients if list_length is None else list_length
        patient_prefs = tuple(
            PreferenceList(p, tuple(rng.sample(doctors, p_len))) for p in patients
        )
        doctor_prefs = tuple(
            PreferenceList(d, tuple(rng.sample(patients, d_len))) for d in doctors
        )
        categories.append(
            CategoryMarket(ci, patients, doctors, patient_prefs, doctor_prefs)
        )
    mode = FULL if list_length is None else PARTIAL
    return Market(tuple(categories), mode)


def store_market(market: Market) -> bytes:
    """Serialize a market to the canonical JSON document."""
    doc = {
        "mode": market.mode,
        "categories": [
            {
                "index": cm.category,
                "patients": [
                    {"id": a.label, "hospital": a.hospital} for a in cm.patients
                ],
                "doctors": [
                    {"id": a.label, "hospital": a.hospital} for a in cm.doctors
                ],
                "patient_prefs": {
                    pl.owner.label: [e.label for e in pl.ranking]
                    for pl in cm.patient_prefs
                },
                "doctor_prefs": {
                    pl.owner.label: [e.label for e in pl.ranking]
                    for pl in cm.doctor_prefs
                },
            }
            for cm in market.categories
        ],
    }
    return json.dumps(doc, indent=2).encode("utf-8")


def _require(doc: dict, key: str, kind, path: str):
    if not isinstance(doc, dict):
        raise MarketFormatError("expected an object", path)
    if key not in doc:
        raise MarketFormatError(f"missing required field {key!r}", path)
    value = doc[key]
    if not isinstance(value, kind):
        raise MarketFormatError(
            f"field {key!r} must be {kind.__name__}", f"{path}.{key}"
        )
    return value


def _load_roster(entries, side: str, category: int, path: str) -> tuple[AgentId, ...]:
    roster = []
    seen_ids = set()
    for pos, entry in enumerate(entries):
        epath = f"{path}[{pos}]"
        ident = _require(entry, "id", str, epath)
        hospital = entry.get("hospital", "")
        if not isinstance(hospital, str):
            raise MarketFormatError("field 'hospital' must be str", epath)
        if ident in seen_ids:
            raise MarketFormatError(f"duplicate agent id {ident!r}", epath)
        seen_ids.add(ident)
        roster.append(AgentId(side, category, pos, hospital))
    return tuple(roster)


def _load_prefs(
    doc: dict,
    key: str,
    owners: tuple[AgentId, ...],
    owner_ids: list[str],
    targets: dict[str, AgentId],
    path: str,
) -> tuple[PreferenceList, ...]:
    table = _require(doc, key, dict, path)
    prefs = []
    for owner, ident in zip(owners, owner_ids):
        ppath = f"{path}.{key}.{ident}"
        if ident not in table:
            raise MarketFormatError(f"missing preference list for {ident!r}", ppath)
        ranking = table[ident]
        if not isinstance(ranking, list):
            raise MarketFormatError("preference list must be an array", ppath)
        resolved = []
        for entry in ranking:
            if not isinstance(entry, str) or entry not in targets:
                raise MarketFormatError(f"unknown agent id {entry!r}", ppath)
            resolved.append(targets[entry])
        prefs.append(PreferenceList(owner, tuple(resolved)))
    return tuple(prefs)


def load_market(data: bytes | str) -> Market:
    """Parse the canonical JSON document; unknown extra fields are ignored."""
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MarketFormatError(f"invalid JSON: {exc}") from exc
    mode = _require(doc, "mode", str, "$")
    if mode not in MODES:
        raise MarketFormatError(f"mode must be one of {MODES}", "$.mode")
    raw_categories = _require(doc, "categories", list, "$")
    categories = []
    for pos, raw in enumerate(raw_categories):
        path = f"$.categories[{pos}]"
        index = _require(raw, "index", int, path)
        p_entries = _require(raw, "patients", list, path)
        d_entries = _require(raw, "doctors", list, path)
        patients = _load_roster(p_entries, PATIENT, index, f"{path}.patients")
        doctors = _load_roster(d_entries, DOCTOR, index, f"{path}.doctors")
        p_ids = [e["id"] for e in p_entries]
        d_ids = [e["id"] for e in d_entries]
        patient_prefs = _load_prefs(
            raw, "patient_prefs", patients, p_ids, dict(zip(d_ids, doctors)), path
        )
        doctor_prefs = _load_prefs(
            raw, "doctor_prefs", doctors, d_ids, dict(zip(p_ids, patients)), path
        )
        categories.append(
            CategoryMarket(index, patients, doctors, patient_prefs, doctor_prefs)
        )
    market = Market(tuple(categories), mode)
    violations = validate_market(market)
    if violations:
        raise MarketFormatError("; ".join(violations), "$")
    return market
