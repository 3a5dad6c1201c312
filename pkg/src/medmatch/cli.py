"""Command line entry point.

Subcommands:
  match run --config cfg.json [overrides]      experiment grid -> CSV/JSON
  match check stability|optimality|truthfulness --market m.json [--side ...]
  match analytics lemma4|lemma5|lemma6 --n N --trials T [--seed S] [--p P]

Exit codes: 0 success, 1 validation/check failure, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import analytics, harness, oracle
from .market import (
    DOCTOR,
    PATIENT,
    InvalidMarketError,
    MarketFormatError,
    load_market,
)
from .mechanisms import tomhecs


def _add_run(subparsers):
    p = subparsers.add_parser("run", help="run the experiment grid from a config file")
    p.add_argument("--config", required=True, help="JSON config file")
    p.add_argument("--seed", default=None)
    p.add_argument("--mechanism", action="append", default=None)
    p.add_argument("--side", choices=(PATIENT, DOCTOR), default=None)
    p.add_argument("--variation", action="append", default=None,
                   choices=tuple(analytics.PRESET_PROBABILITIES))
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
    p.set_defaults(func=cmd_run)


def _add_check(subparsers):
    p = subparsers.add_parser("check", help="verify mechanism properties on a market")
    p.add_argument("property", choices=("stability", "optimality", "truthfulness"))
    p.add_argument("--market", required=True, help="market JSON file")
    p.add_argument("--side", choices=(PATIENT, DOCTOR), default=PATIENT)
    p.set_defaults(func=cmd_check)


def _add_analytics(subparsers):
    p = subparsers.add_parser("analytics", help="Monte Carlo expectation estimators")
    p.add_argument("model", choices=("lemma4", "lemma5", "lemma6"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=float, default=0.5,
                   help="per-step rejection probability (lemma6)")
    p.add_argument("--agents", type=int, default=1,
                   help="number of agents totalled (lemma6)")
    p.set_defaults(func=cmd_analytics)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="match",
        description="Two-sided categorized patient-doctor matching toolkit.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    _add_run(subparsers)
    _add_check(subparsers)
    _add_analytics(subparsers)
    return parser


def cmd_run(args) -> int:
    with open(args.config, "r", encoding="utf-8") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise harness.ConfigError(f"invalid config JSON: {exc}") from exc
    config = harness.ExperimentConfig.from_dict(doc)
    if args.seed is not None:
        config.seed = args.seed
    if args.mechanism:
        config.mechanisms = tuple(args.mechanism)
    if args.side:
        config.proposing_side = args.side
    if args.variation:
        config.presets = tuple(args.variation)
    if args.reps is not None:
        config.repetitions = args.reps
    if args.out:
        config.out = args.out
    if args.fmt:
        config.fmt = args.fmt
    config.validate()
    out = config.out or "results.csv"
    result = harness.run_experiment(config)
    harness.emit(result.rows, config.fmt, out)
    if config.save_matchings:
        side_path = out + ".matchings.json"
        with open(side_path, "w", encoding="utf-8") as handle:
            json.dump(harness.matchings_to_jsonable(result.matchings), handle, indent=2)
        print(f"matchings: {side_path}")
    print(f"wrote {len(result.rows)} rows to {out}")
    for key, stats in sorted(harness.summarize(result.rows).items()):
        mechanism, preset, side = key
        print(
            f"{mechanism:8s} {preset:7s} {side:7s} "
            f"eta {stats['eta_mean']:.2f}+/-{stats['eta_std']:.2f} "
            f"zeta {stats['zeta_mean']:.2f}+/-{stats['zeta_std']:.2f}"
        )
    return 0


def cmd_check(args) -> int:
    with open(args.market, "rb") as handle:
        market = load_market(handle.read())
    matching, _ = tomhecs(market, args.side)
    failed = False
    if args.property == "stability":
        for cm in market.categories:
            pairs = oracle.find_blocking_pairs(cm, matching)
            status = "stable" if not pairs else f"{len(pairs)} blocking pair(s)"
            print(f"category {cm.category}: {status}")
            failed = failed or bool(pairs)
    elif args.property == "optimality":
        for cm in market.categories:
            ok = oracle.check_requesting_party_optimal(cm, matching, args.side)
            print(f"category {cm.category}: {'optimal' if ok else 'NOT optimal'}")
            failed = failed or not ok
    else:
        for cm in market.categories:
            reports = oracle.check_truthfulness_exhaustive(cm, args.side)
            bad = [r for r in reports if r.violations]
            tried = sum(r.misreports_tried for r in reports)
            print(
                f"category {cm.category}: {tried} misreports tried, "
                f"{len(bad)} agent(s) with strict improvements"
            )
            failed = failed or bool(bad)
    return 1 if failed else 0


def cmd_analytics(args) -> int:
    if args.model == "lemma4":
        result = analytics.estimate_first_pick_distance(args.n, args.trials, args.seed)
        reference = (args.n - 1) / 2
        label = "(n-1)/2"
    elif args.model == "lemma5":
        result = analytics.estimate_total_distance(args.n, args.trials, args.seed)
        reference = args.n * args.n / 16
        label = "n^2/16 lower bound"
    else:
        result = analytics.simulate_geometric_rejections(
            args.p, args.n, args.trials, args.seed, args.agents
        )
        reference = args.agents / (1 - args.p)
        label = "agents/(1-p)"
    print(
        f"mean {result.mean:.4f} +/- {result.std_error:.4f} "
        f"({result.trials} trials); {label} = {reference:.4f}"
    )
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MarketFormatError, InvalidMarketError, harness.ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
