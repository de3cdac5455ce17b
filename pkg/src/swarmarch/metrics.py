"""Trajectory statistics and machine-readable report artifacts.

Scalability summary
    * connected_from: size and iteration of the first connected snapshot
      (None when the run never connects).
    * growth_limit: maximum swarm size over the run.
    * saturation: the stable terminal size (median of the last ten
      iterations) and the first iteration at which the swarm attains that
      size while never straying more than two drones from it afterwards.

Energy summary
    Median, population variance and maximum of the per-iteration
    swarm-total energy series.

Artifacts
    Per-iteration CSV, a JSON summary document keyed by run name, and
    plot-ready JSON series (size / energy over iterations, energy
    distribution). Serialization is deterministic: re-emitting the same
    trajectory is byte-identical.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass
from pathlib import Path

from .engine import Trajectory

CSV_HEADER = "iteration,architecture,swarm_size,connected,per_drone_energy_w,total_energy_w,depleted"

SATURATION_WINDOW = 10
SATURATION_DRIFT = 2


@dataclass(frozen=True)
class SizeAtIteration:
    size: float
    iteration: int

    def label(self) -> str:
        size = int(self.size) if float(self.size).is_integer() else self.size
        return f"{size}@{self.iteration}"


@dataclass(frozen=True)
class ScalabilitySummary:
    connected_from: SizeAtIteration | None
    growth_limit: int
    saturation: SizeAtIteration


@dataclass(frozen=True)
class EnergySummary:
    median_energy: float
    variance: float
    peak_energy: float


@dataclass(frozen=True)
class RunReport:
    name: str
    scalability: ScalabilitySummary
    energy: EnergySummary
    connectivity: float  # fraction of iterations with the swarm connected


@dataclass(frozen=True)
class RadarScores:
    """Relative [0, 1] scores, comparable only within one report."""

    scalability: float
    connectivity: float
    energy_efficiency: float


def _saturation(sizes: list[int]) -> SizeAtIteration:
    window = sizes[-SATURATION_WINDOW:]
    median = statistics.median(window)
    last = len(sizes) - 1
    contained = None
    for i in range(len(sizes)):
        if all(abs(x - median) <= SATURATION_DRIFT for x in sizes[i:]):
            contained = i
            break
    if contained is None:
        return SizeAtIteration(size=median, iteration=last)
    for i in range(contained, len(sizes)):
        if sizes[i] == median:
            return SizeAtIteration(size=median, iteration=i)
    return SizeAtIteration(size=median, iteration=contained)


def summarize_scalability(traj: Trajectory) -> ScalabilitySummary:
    if not traj.snapshots:
        raise ValueError("cannot summarize an empty trajectory")
    connected_from = None
    for snap in traj.snapshots:
        if snap.connected:
            connected_from = SizeAtIteration(size=snap.size, iteration=snap.iteration)
            break
    sizes = traj.sizes()
    return ScalabilitySummary(
        connected_from=connected_from,
        growth_limit=max(sizes),
        saturation=_saturation(sizes),
    )


def summarize_energy(traj: Trajectory) -> EnergySummary:
    if not traj.snapshots:
        raise ValueError("cannot summarize an empty trajectory")
    series = traj.total_energy_series()
    return EnergySummary(
        median_energy=statistics.median(series),
        variance=statistics.pvariance(series),
        peak_energy=max(series),
    )


def connectivity_fraction(traj: Trajectory) -> float:
    if not traj.snapshots:
        raise ValueError("cannot summarize an empty trajectory")
    return sum(1 for s in traj.snapshots if s.connected) / len(traj.snapshots)


def build_report(name: str, traj: Trajectory) -> RunReport:
    return RunReport(
        name=name,
        scalability=summarize_scalability(traj),
        energy=summarize_energy(traj),
        connectivity=connectivity_fraction(traj),
    )


def radar_scores(reports: list[RunReport]) -> dict[str, RadarScores]:
    """Normalize growth, connectivity and median energy across runs."""
    if len(reports) < 2:
        raise ValueError("radar scores need summaries for at least two runs")
    max_growth = max(r.scalability.growth_limit for r in reports)
    min_median = min(r.energy.median_energy for r in reports)
    scores = {}
    for r in reports:
        median = r.energy.median_energy
        scores[r.name] = RadarScores(
            scalability=r.scalability.growth_limit / max_growth if max_growth else 1.0,
            connectivity=r.connectivity,
            energy_efficiency=min_median / median if median > 0 else 1.0,
        )
    return scores


def format_energy(value: float) -> str:
    """Decimal with up to three fractional digits, no trailing zeros."""
    text = f"{value:.3f}".rstrip("0").rstrip(".")
    return text if text else "0"


def csv_lines(traj: Trajectory) -> list[str]:
    lines = [CSV_HEADER]
    for s in traj.snapshots:
        lines.append(
            ",".join(
                (
                    str(s.iteration),
                    s.active_architecture.value,
                    str(s.size),
                    "true" if s.connected else "false",
                    format_energy(s.per_drone_energy),
                    format_energy(s.total_energy),
                    str(s.depleted_this_iteration),
                )
            )
        )
    return lines


def write_csv(traj: Trajectory, path: str | Path) -> Path:
    path = Path(path)
    try:
        path.write_text("\n".join(csv_lines(traj)) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write trajectory CSV to {path}: {exc}") from exc
    return path


def _scalability_document(summary: ScalabilitySummary) -> dict:
    def point(p: SizeAtIteration | None) -> dict | None:
        if p is None:
            return None
        return {"size": p.size, "iteration": p.iteration}

    return {
        "connected_from": point(summary.connected_from),
        "growth_limit": summary.growth_limit,
        "saturation": point(summary.saturation),
    }


def _energy_document(summary: EnergySummary) -> dict:
    return {
        "median_energy_w": round(summary.median_energy, 3),
        "variance": round(summary.variance, 3),
        "peak_energy_w": round(summary.peak_energy, 3),
    }


def summary_document(reports: list[RunReport]) -> dict:
    return {
        r.name: {
            "scalability": _scalability_document(r.scalability),
            "energy": _energy_document(r.energy),
            "connectivity": round(r.connectivity, 6),
        }
        for r in reports
    }


def write_summary(reports: list[RunReport], path: str | Path) -> Path:
    path = Path(path)
    try:
        path.write_text(json.dumps(summary_document(reports), indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write summary to {path}: {exc}") from exc
    return path


def plot_document(traj: Trajectory) -> dict:
    """Series for size-vs-iteration, energy-vs-iteration and the energy
    distribution plots."""
    iterations = [s.iteration for s in traj.snapshots]
    totals = [round(s.total_energy, 3) for s in traj.snapshots]
    return {
        "iteration": iterations,
        "swarm_size": traj.sizes(),
        "connected": [s.connected for s in traj.snapshots],
        "total_energy_w": totals,
        "energy_distribution_w": sorted(totals),
    }


def write_plotdata(traj: Trajectory, path: str | Path) -> Path:
    path = Path(path)
    try:
        path.write_text(json.dumps(plot_document(traj), indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write plot data to {path}: {exc}") from exc
    return path
