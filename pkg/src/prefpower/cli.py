"""Command-line front end for the power simulation harness.

Settings resolve in three layers: built-in defaults, then the optional
JSON config file, then explicit command-line flags.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .design import ConfigError, default_definitions, load_config
from .harness import DEFAULT_MASTER_SEED, METHODS, RunPlan, estimate_power
from .report import emit_report

_SCENARIO_DEFAULT = ("S1", "S2", "S3", "S4", "S5", "S6", "S7", "S8")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prefpower",
        description=(
            "Monte Carlo power and type-I-error estimation for patient-ranked "
            "(composite DOOR, WWP) and patient-selected (Welch mean, Wald "
            "proportion) composite endpoints in a two-arm trial."
        ),
    )
    parser.add_argument("--scenario", help="scenario id, comma list, or 'all' (default all)")
    parser.add_argument("--methods", help="method names, comma list, or 'all' (default all)")
    parser.add_argument("--preferences", choices=["unequal", "equal"], help="preference mode")
    parser.add_argument("--correlation", choices=["low", "medium", "high"], help="correlation setting")
    parser.add_argument("--margin", choices=["mcid", "zero"], help="win margin mode")
    parser.add_argument("--n-sims", type=int, help="Monte Carlo replicates per scenario (default 10000)")
    parser.add_argument("--seed", type=int, help=f"master seed (default {DEFAULT_MASTER_SEED})")
    parser.add_argument("--recalibrate", choices=["on", "off"], help="null-based threshold recalibration (default on)")
    parser.add_argument("--format", choices=["csv", "markdown"], default=None, help="report format (default markdown)")
    parser.add_argument("--config", type=Path, help="JSON config overriding the built-in presets")
    parser.add_argument("--output", type=Path, help="write the report here instead of stdout")
    parser.add_argument("--workers", type=int, default=1, help="parallel worker processes (default 1)")
    return parser


def _parse_list(raw, universe, label):
    if raw is None or raw == "all":
        return tuple(universe)
    items = tuple(token.strip() for token in raw.split(",") if token.strip())
    if not items:
        raise ConfigError(f"empty {label} list")
    return items


def build_plan(args, plan_overrides: dict) -> RunPlan:
    def setting(cli_value, key, default):
        if cli_value is not None:
            return cli_value
        return plan_overrides.get(key, default)

    scenarios = (
        _parse_list(args.scenario, _SCENARIO_DEFAULT, "scenario")
        if args.scenario is not None
        else tuple(plan_overrides.get("scenarios", _SCENARIO_DEFAULT))
    )
    methods = (
        _parse_list(args.methods, METHODS, "method")
        if args.methods is not None
        else tuple(plan_overrides.get("methods", METHODS))
    )
    recalibrate = (
        args.recalibrate == "on"
        if args.recalibrate is not None
        else bool(plan_overrides.get("recalibrate", True))
    )
    return RunPlan(
        scenarios=scenarios,
        methods=methods,
        n_sim=int(setting(args.n_sims, "n_sim", 10_000)),
        alpha=float(plan_overrides.get("alpha", 0.05)),
        preference_mode=setting(args.preferences, "preference_mode", "unequal"),
        correlation=setting(args.correlation, "correlation", "medium"),
        margin_mode=setting(args.margin, "margin_mode", "mcid"),
        master_seed=int(setting(args.seed, "master_seed", DEFAULT_MASTER_SEED)),
        recalibrate=recalibrate,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config is not None:
            plan_overrides, definitions = load_config(args.config)
        else:
            plan_overrides, definitions = {}, default_definitions()
        plan = build_plan(args, plan_overrides)
        report = estimate_power(plan, definitions, workers=max(1, args.workers))
        text = emit_report(report, args.format or "markdown")
    except ConfigError as exc:
        print(f"prefpower: configuration error: {exc}", file=sys.stderr)
        return 1
    if args.output is not None:
        args.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
