"""Seeded experiment runner: mechanism x variation preset grid with CSV/JSON output.

Each repetition generates a fresh random market, applies each variation
preset to the designated party, runs each mechanism, and scores the result
against the TRUE (unperturbed) preferences. Identical configs produce
byte-identical output files.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field, fields
from statistics import fmean, stdev

from .analytics import PRESET_PROBABILITIES, PerturbationSpec, perturb_preferences
from .market import DOCTOR, FULL, MODES, PARTIAL, PATIENT, Market, opposite
from .mechanisms import MECHANISMS, Matching, run_mechanism
from .market import generate_random_market
from .metrics import preferable_allocation_count, satisfaction_level

REQUESTING = "requesting"
REQUESTED = "requested"

CSV_COLUMNS = (
    "rep",
    "category",
    "mechanism",
    "preset",
    "deviating_party",
    "measured_side",
    "eta",
    "zeta",
    "proposals",
    "rejections",
    "matched_count",
)


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    k: int = 10
    n_patients: int = 20
    n_doctors: int = 20
    mode: str = FULL
    list_length: int | None = None
    mechanisms: tuple[str, ...] = ("ramhecs", "tomhecs")
    proposing_side: str = PATIENT
    measured_sides: tuple[str, ...] = (PATIENT,)
    presets: tuple[str, ...] = ("none",)
    deviating_party: str = REQUESTING
    repetitions: int = 1
    seed: int | str = 0
    out: str | None = None
    fmt: str = "csv"
    save_matchings: bool = False

    def validate(self) -> None:
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.mode == PARTIAL and self.list_length is None:
            raise ConfigError("partial mode requires list_length")
        if self.mode == FULL and self.list_length is not None:
            raise ConfigError("list_length is only meaningful in partial mode")
        for mech in self.mechanisms:
            if mech not in MECHANISMS:
                raise ConfigError(f"unknown mechanism {mech!r}")
        if self.proposing_side not in (PATIENT, DOCTOR):
            raise ConfigError(f"unknown proposing side {self.proposing_side!r}")
        for side in self.measured_sides:
            if side not in (PATIENT, DOCTOR):
                raise ConfigError(f"unknown measured side {side!r}")
        for preset in self.presets:
            if preset not in PRESET_PROBABILITIES:
                raise ConfigError(f"unknown variation preset {preset!r}")
        if self.deviating_party not in (REQUESTING, REQUESTED):
            raise ConfigError(f"unknown deviating party {self.deviating_party!r}")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.fmt!r}")

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**doc)
        for name in ("mechanisms", "measured_sides", "presets"):
            setattr(cfg, name, tuple(getattr(cfg, name)))
        return cfg


@dataclass
class ResultRow:
    rep: int
    category: int
    mechanism: str
    preset: str
    deviating_party: str
    measured_side: str
    eta: int
    zeta: int
    proposals: int
    rejections: int
    matched_count: int


@dataclass
class ExperimentResult:
    rows: list[ResultRow]
    # (rep, mechanism, preset) -> Matching, kept only when save_matchings is set
    matchings: dict[tuple[int, str, str], Matching] = field(default_factory=dict)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    config.validate()
    result = ExperimentResult([])
    deviating_side = (
        config.proposing_side
        if config.deviating_party == REQUESTING
        else opposite(config.proposing_side)
    )
    for rep in range(config.repetitions):
        market = generate_random_market(
            config.k,
            config.n_patients,
            config.n_doctors,
            config.list_length,
            seed=f"{config.seed}:market:{rep}",
        )
        perturbed = {
            preset: perturb_preferences(
                market,
                PerturbationSpec(
                    deviating_side,
                    PRESET_PROBABILITIES[preset],
                    seed=f"{config.seed}:perturb:{rep}:{preset}",
                ),
            )
            for preset in config.presets
        }
        for mechanism in config.mechanisms:
            for preset in config.presets:
                matching, stats = run_mechanism(
                    perturbed[preset],
                    mechanism,
                    config.proposing_side,
                    seed=f"{config.seed}:run:{rep}:{mechanism}:{preset}",
                )
                if config.save_matchings:
                    result.matchings[(rep, mechanism, preset)] = matching
                for side in config.measured_sides:
                    # Scored against the TRUE preferences, not the misreports.
                    eta_by_cat, _ = satisfaction_level(market, matching, side)
                    zeta_by_cat, _ = preferable_allocation_count(market, matching, side)
                    for cm in market.categories:
                        trace = stats.for_category(cm.category)
                        result.rows.append(
                            ResultRow(
                                rep=rep,
                                category=cm.category,
                                mechanism=mechanism,
                                preset=preset,
                                deviating_party=config.deviating_party,
                                measured_side=side,
                                eta=eta_by_cat[cm.category],
                                zeta=zeta_by_cat[cm.category],
                                proposals=trace.proposals,
                                rejections=trace.rejections,
                                matched_count=matching.matched_count(cm.category),
                            )
                        )
    return result


def rows_to_csv(rows: list[ResultRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        record = asdict(row)
        writer.writerow([record[col] for col in CSV_COLUMNS])
    return buffer.getvalue()


def rows_to_json(rows: list[ResultRow]) -> str:
    return json.dumps([asdict(row) for row in rows], indent=2) + "\n"


def emit(rows: list[ResultRow], fmt: str, path: str) -> None:
    if fmt == "csv":
        payload = rows_to_csv(rows)
    elif fmt == "json":
        payload = rows_to_json(rows)
    else:
        raise ConfigError(f"unknown output format {fmt!r}")
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(payload)


def summarize(rows: list[ResultRow]) -> dict[tuple[str, str, str], dict[str, float]]:
    """Group by (mechanism, preset, measured side); report mean and std of the
    per-repetition aggregates of eta and zeta (summed over categories).
    """
    if not rows:
        raise ValueError("summarize requires at least one row")
    per_rep: dict[tuple[str, str, str], dict[int, dict[str, int]]] = {}
    for row in rows:
        key = (row.mechanism, row.preset, row.measured_side)
        rep_totals = per_rep.setdefault(key, {}).setdefault(
            row.rep, {"eta": 0, "zeta": 0}
        )
        rep_totals["eta"] += row.eta
        rep_totals["zeta"] += row.zeta
    summary = {}
    for key, reps in per_rep.items():
        etas = [totals["eta"] for totals in reps.values()]
        zetas = [totals["zeta"] for totals in reps.values()]
        summary[key] = {
            "reps": len(reps),
            "eta_mean": fmean(etas),
            "eta_std": stdev(etas) if len(etas) > 1 else 0.0,
            "zeta_mean": fmean(zetas),
            "zeta_std": stdev(zetas) if len(zetas) > 1 else 0.0,
        }
    return summary


def matchings_to_jsonable(matchings: dict[tuple[int, str, str], Matching]) -> list[dict]:
    records = []
    for (rep, mechanism, preset), matching in sorted(matchings.items()):
        records.append(
            {
                "rep": rep,
                "mechanism": mechanism,
                "preset": preset,
                "pairs": {
                    str(category): sorted(
                        [p.label, d.label] for p, d in pairs
                    )
                    for category, pairs in sorted(matching.by_category.items())
                },
            }
        )
    return records


def matching_from_jsonable(record: dict, market: Market) -> Matching:
    by_category = {}
    for cm in market.categories:
        patients = {a.label: a for a in cm.patients}
        doctors = {a.label: a for a in cm.doctors}
        pairs = record["pairs"].get(str(cm.category), [])
        by_category[cm.category] = frozenset(
            (patients[p], doctors[d]) for p, d in pairs
        )
    return Matching(by_category)
