"""Batch command line: run simulations, query the recommender, audit rules.

``swarmarch simulate`` with no flags reproduces the headline experiment:
all four modes, default parameters, 150 iterations. Flags override the
config file, which overrides defaults.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from . import metrics
from .backends import BackendNotConfigured, ExternalModelBackend
from .decision import (
    CommQuality,
    FailureProbability,
    MissionContext,
    Scenario,
    SizeClass,
    Status,
    decide,
    export_rule_table,
    recommend,
)
from .engine import ConfigError, RunConfig, run
from .model import ControlMode, EnergyModelParams

MODE_NAMES = ("centralized", "hierarchical", "holonic", "adaptive")
EMIT_FORMATS = ("csv", "summary", "plotdata")

TASK_FLAGS = {
    "sar": Scenario.SEARCH_AND_RESCUE,
    "mapping": Scenario.LARGE_AREA_MAPPING,
    "delivery": Scenario.EMERGENCY_SUPPLY_DELIVERY,
    "assessment": Scenario.POST_DISASTER_ASSESSMENT,
}
STATUS_FLAGS = {
    "critical_failure": Status.CRITICAL_FAILURE,
    "idle": Status.IDLE_STATE,
    "spread_out": Status.SPREAD_OUT,
    "overload": Status.OVERLOAD,
}


@dataclass
class ExperimentConfig:
    """Named runs plus output layout; mirrors the YAML config format."""

    runs: list[tuple[str, RunConfig]] = field(default_factory=list)
    output_dir: Path = Path("results")
    emit_formats: tuple[str, ...] = ("csv", "summary")

    def validate(self) -> None:
        names = [name for name, _ in self.runs]
        if len(set(names)) != len(names):
            raise ConfigError(f"runs: names must be unique, got {names}")
        for fmt in self.emit_formats:
            if fmt not in EMIT_FORMATS:
                raise ConfigError(f"emit: unknown format {fmt!r}; expected {EMIT_FORMATS}")
        for _, cfg in self.runs:
            cfg.validate()


def _params_from_mapping(raw: dict) -> EnergyModelParams:
    allowed = {
        "k_o", "k_ce", "k_hi", "k_ho", "capacity_b",
        "n_hier_min", "n_holonic_min", "drones_added_per_iteration",
    }
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"params: unknown fields {sorted(unknown)}")
    try:
        return EnergyModelParams(**raw)
    except ValueError as exc:
        raise ConfigError(f"params: {exc}") from exc


def load_experiment_config(path: Path) -> ExperimentConfig:
    try:
        raw = yaml.safe_load(path.read_text()) or {}
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config: invalid YAML in {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config: top level of {path} must be a mapping")

    cfg = ExperimentConfig()
    if "output_dir" in raw:
        cfg.output_dir = Path(str(raw["output_dir"]))
    if "emit" in raw:
        cfg.emit_formats = tuple(str(f) for f in raw["emit"])
    for entry in raw.get("runs", []):
        if not isinstance(entry, dict) or "mode" not in entry:
            raise ConfigError("runs: each entry needs at least a 'mode' field")
        try:
            mode = ControlMode.parse(str(entry["mode"]))
        except ValueError as exc:
            raise ConfigError(f"runs: {exc}") from exc
        params = _params_from_mapping(entry.get("params", {}) or {})
        run_cfg = RunConfig(
            mode=mode,
            params=params,
            initial_size=int(entry.get("initial_size", 0)),
            iterations=int(entry.get("iterations", 150)),
            seed=int(entry.get("seed", 0)),
        )
        cfg.runs.append((str(entry.get("name", mode.name)), run_cfg))
    return cfg


def _default_runs(iterations: int, initial_size: int, params: EnergyModelParams,
                  modes: list[str]) -> list[tuple[str, RunConfig]]:
    return [
        (name, RunConfig(mode=ControlMode.parse(name), params=params,
                         initial_size=initial_size, iterations=iterations))
        for name in modes
    ]


def _print_report_table(reports: list[metrics.RunReport]) -> None:
    header = (
        f"{'architecture':<14}{'connected_from':<16}{'growth_limit':<14}"
        f"{'saturation':<13}{'median_w':<11}{'variance':<14}{'peak_w':<10}"
    )
    print(header)
    print("-" * len(header))
    for r in reports:
        connected = r.scalability.connected_from
        print(
            f"{r.name:<14}"
            f"{(connected.label() if connected else 'never'):<16}"
            f"{r.scalability.growth_limit:<14}"
            f"{r.scalability.saturation.label():<13}"
            f"{metrics.format_energy(r.energy.median_energy):<11}"
            f"{metrics.format_energy(r.energy.variance):<14}"
            f"{metrics.format_energy(r.energy.peak_energy):<10}"
        )


def cmd_simulate(args: argparse.Namespace) -> int:
    params = EnergyModelParams()
    if args.battery is not None:
        try:
            params = replace(params, capacity_b=args.battery)
        except ValueError as exc:
            print(f"error: battery: {exc}", file=sys.stderr)
            return 2

    if args.config is not None:
        try:
            experiment = load_experiment_config(Path(args.config))
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    else:
        experiment = ExperimentConfig()

    mode = "all" if args.all else args.mode
    if mode is not None or not experiment.runs:
        modes = list(MODE_NAMES) if mode in (None, "all") else [mode]
        experiment.runs = _default_runs(
            args.iterations if args.iterations is not None else 150,
            args.initial_size, params, modes,
        )
    elif args.iterations is not None or args.battery is not None or args.initial_size:
        experiment.runs = [
            (name, replace(
                cfg,
                iterations=args.iterations if args.iterations is not None else cfg.iterations,
                params=replace(cfg.params, capacity_b=args.battery) if args.battery is not None else cfg.params,
                initial_size=args.initial_size or cfg.initial_size,
            ))
            for name, cfg in experiment.runs
        ]
    if args.out is not None:
        experiment.output_dir = Path(args.out)
    if args.emit is not None:
        experiment.emit_formats = tuple(f.strip() for f in args.emit.split(",") if f.strip())

    try:
        experiment.validate()
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        experiment.output_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: output_dir: cannot create {experiment.output_dir}: {exc}",
              file=sys.stderr)
        return 1

    reports = []
    try:
        for name, cfg in experiment.runs:
            traj = run(cfg)
            reports.append(metrics.build_report(name, traj))
            if "csv" in experiment.emit_formats:
                metrics.write_csv(traj, experiment.output_dir / f"{name}.csv")
            if "plotdata" in experiment.emit_formats:
                metrics.write_plotdata(traj, experiment.output_dir / f"{name}_plotdata.json")
        if "summary" in experiment.emit_formats:
            metrics.write_summary(reports, experiment.output_dir / "summary.json")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    _print_report_table(reports)
    return 0


def cmd_recommend(args: argparse.Namespace) -> int:
    ctx = MissionContext(
        scenario=TASK_FLAGS[args.task] if args.task else None,
        status=STATUS_FLAGS[args.status] if args.status else None,
        size_class=SizeClass(args.size),
        comm_quality=CommQuality(args.comm),
        failure_probability=FailureProbability(args.failure),
    )
    if args.backend == "external":
        try:
            backend = ExternalModelBackend.from_env()
        except BackendNotConfigured as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        rec = decide(ctx, backend)
    else:
        rec = recommend(ctx)
    print(f"architecture: {rec.architecture.value}")
    print(f"matched_rule: {rec.matched_rule}")
    print(f"source: {rec.source.value}")
    print(f"rationale: {rec.rationale}")
    return 0


def cmd_export_rules(args: argparse.Namespace) -> int:
    export_rule_table(Path(args.out))
    print(f"wrote rule table to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmarch",
        description="Drone-swarm control-architecture simulator and recommender",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run architecture simulations and emit metrics")
    sim.add_argument("--mode", choices=MODE_NAMES + ("all",), default=None)
    sim.add_argument("--all", action="store_true", help="run all four modes")
    sim.add_argument("--iterations", type=int, default=None)
    sim.add_argument("--battery", type=float, default=None,
                     help="battery capacity in W-units")
    sim.add_argument("--initial-size", type=int, default=0)
    sim.add_argument("--out", default=None, help="output directory (default: results)")
    sim.add_argument("--emit", default=None,
                     help="comma list from: csv,summary,plotdata (default: csv,summary)")
    sim.add_argument("--config", default=None, help="YAML experiment config")
    sim.set_defaults(func=cmd_simulate)

    rec = sub.add_parser("recommend", help="recommend an architecture for a mission context")
    group = rec.add_mutually_exclusive_group(required=True)
    group.add_argument("--task", choices=sorted(TASK_FLAGS))
    group.add_argument("--status", choices=sorted(STATUS_FLAGS))
    rec.add_argument("--size", choices=[s.value for s in SizeClass], required=True)
    rec.add_argument("--comm", choices=[c.value for c in CommQuality], required=True)
    rec.add_argument("--failure", choices=[f.value for f in FailureProbability], required=True)
    rec.add_argument("--backend", choices=("rules", "external"), default="rules")
    rec.set_defaults(func=cmd_recommend)

    rules = sub.add_parser("export-rules", help="write the policy table for audit")
    rules.add_argument("--out", default="rule_table.json")
    rules.set_defaults(func=cmd_export_rules)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
