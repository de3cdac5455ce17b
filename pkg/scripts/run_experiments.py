#!/usr/bin/env python3
"""Reproduce the headline benchmark: all four control modes, default
parameters, 150 iterations; writes CSV + summary + plot data and prints
the scalability/energy tables plus relative radar scores.

Usage: python scripts/run_experiments.py [--out DIR] [--iterations N]
"""

from __future__ import annotations

import argparse
from pathlib import Path

from swarmarch import ControlMode, RunConfig, run
from swarmarch.metrics import (
    build_report,
    format_energy,
    radar_scores,
    write_csv,
    write_plotdata,
    write_summary,
)

MODES = ("centralized", "hierarchical", "holonic", "adaptive")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="results", type=Path)
    parser.add_argument("--iterations", default=150, type=int)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    reports = []
    for name in MODES:
        traj = run(RunConfig(mode=ControlMode.parse(name), iterations=args.iterations))
        reports.append(build_report(name, traj))
        write_csv(traj, args.out / f"{name}.csv")
        write_plotdata(traj, args.out / f"{name}_plotdata.json")
    write_summary(reports, args.out / "summary.json")

    print(f"{'architecture':<14}{'connected':<12}{'growth':<9}{'saturation':<13}"
          f"{'median_w':<11}{'peak_w':<10}")
    for r in reports:
        conn = r.scalability.connected_from
        print(f"{r.name:<14}{(conn.label() if conn else 'never'):<12}"
              f"{r.scalability.growth_limit:<9}{r.scalability.saturation.label():<13}"
              f"{format_energy(r.energy.median_energy):<11}"
              f"{format_energy(r.energy.peak_energy):<10}")

    print("\nrelative scores (1.0 = best in this report)")
    print(f"{'architecture':<14}{'scalability':<13}{'connectivity':<14}{'energy_eff':<10}")
    for name, s in radar_scores(reports).items():
        print(f"{name:<14}{s.scalability:<13.3f}{s.connectivity:<14.3f}"
              f"{s.energy_efficiency:<10.3f}")

    print(f"\nartifacts written to {args.out}/")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
