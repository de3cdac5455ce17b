"""Battery-tracked swarm lifecycle simulation.

Each iteration, in order:

1. a fixed number of fresh drones joins at full capacity,
2. the active architecture is determined (static, or re-selected from the
   post-addition swarm size in adaptive mode),
3. every drone is assessed the same per-drone energy for that architecture
   and size, and drains it from its battery (a drone with less charge than
   the assessment drains what it has left),
4. drones at zero battery are removed, and
5. a snapshot is emitted with the survivor set, connectivity flag and the
   energy actually drained this iteration.

A run is fully deterministic: identical configs produce identical
trajectories. Runs share no mutable state and can execute in parallel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import (
    ArchitectureKind,
    ControlMode,
    DroneState,
    EnergyModelParams,
    SwarmSnapshot,
    is_connected,
    per_drone_energy,
)


class ConfigError(ValueError):
    """Raised for invalid run configuration, before any stepping."""


@dataclass(frozen=True)
class RunConfig:
    """Configuration of one simulation run.

    ``seed`` is reserved for stochastic extensions; the core loop is
    deterministic and ignores it.
    """

    mode: ControlMode
    params: EnergyModelParams = field(default_factory=EnergyModelParams)
    initial_size: int = 0
    iterations: int = 150
    seed: int = 0

    def validate(self) -> None:
        if self.iterations < 1:
            raise ConfigError(f"iterations: must be >= 1, got {self.iterations}")
        if self.initial_size < 0:
            raise ConfigError(f"initial_size: must be >= 0, got {self.initial_size}")


@dataclass(frozen=True)
class Trajectory:
    """Ordered per-iteration snapshots of one run."""

    config: RunConfig
    snapshots: tuple[SwarmSnapshot, ...]

    def sizes(self) -> list[int]:
        return [s.size for s in self.snapshots]

    def total_energy_series(self) -> list[float]:
        return [s.total_energy for s in self.snapshots]


def adaptive_select(n: int, params: EnergyModelParams) -> ArchitectureKind:
    """Architecture for swarm size ``n`` under the adaptive threshold policy.

    Thresholds sit exactly at the formation minimums, so the selected
    architecture is always connected for n >= 1.
    """
    if n < params.n_hier_min:
        return ArchitectureKind.CENTRALIZED
    if n < params.n_holonic_min:
        return ArchitectureKind.HIERARCHICAL
    return ArchitectureKind.HOLONIC


def step(
    snapshot: SwarmSnapshot,
    mode: ControlMode,
    params: EnergyModelParams,
    next_id: int,
) -> tuple[SwarmSnapshot, int]:
    """Advance one iteration from ``snapshot``; returns (snapshot, next_id).

    An all-depleted swarm is a valid input; the next iteration re-seeds
    via the fixed addition stream.
    """
    iteration = snapshot.iteration + 1
    joined = tuple(
        DroneState(id=next_id + k, battery=params.capacity_b, born_at=iteration)
        for k in range(params.drones_added_per_iteration)
    )
    next_id += len(joined)
    fleet = snapshot.drones + joined
    n = len(fleet)

    if mode.is_adaptive:
        arch = adaptive_select(n, params)
    else:
        arch = mode.architecture

    if n == 0:
        return (
            SwarmSnapshot(
                iteration=iteration,
                drones=(),
                active_architecture=arch,
                connected=False,
                per_drone_energy=0.0,
                total_energy=0.0,
                depleted_this_iteration=0,
            ),
            next_id,
        )

    energy = per_drone_energy(arch, n, params)
    survivors: list[DroneState] = []
    drained = 0.0
    for drone in fleet:
        if drone.battery > energy:
            drained += energy
            survivors.append(
                DroneState(id=drone.id, battery=drone.battery - energy, born_at=drone.born_at)
            )
        else:
            drained += drone.battery  # final partial drain; battery floors at zero
    depleted = n - len(survivors)

    new = SwarmSnapshot(
        iteration=iteration,
        drones=tuple(survivors),
        active_architecture=arch,
        connected=is_connected(arch, len(survivors), params),
        per_drone_energy=energy,
        total_energy=drained,
        depleted_this_iteration=depleted,
    )
    return new, next_id


def initial_snapshot(config: RunConfig, iteration: int = -1) -> tuple[SwarmSnapshot, int]:
    """Pre-run state: ``initial_size`` drones at full capacity.

    For batch runs the seed sits at iteration -1 so the first stepped
    snapshot is iteration 0; live sessions seed at iteration 0 instead.
    """
    params = config.params
    drones = tuple(
        DroneState(id=k, battery=params.capacity_b, born_at=iteration)
        for k in range(config.initial_size)
    )
    n = len(drones)
    arch = (
        adaptive_select(n, params) if config.mode.is_adaptive else config.mode.architecture
    )
    snap = SwarmSnapshot(
        iteration=iteration,
        drones=drones,
        active_architecture=arch,
        connected=is_connected(arch, n, params),
        per_drone_energy=0.0,
        total_energy=0.0,
        depleted_this_iteration=0,
    )
    return snap, config.initial_size


def run(config: RunConfig) -> Trajectory:
    """Execute the full run; drone ids are creation-ordered and never reused."""
    config.validate()
    snapshot, next_id = initial_snapshot(config)
    out: list[SwarmSnapshot] = []
    for _ in range(config.iterations):
        snapshot, next_id = step(snapshot, config.mode, config.params, next_id)
        out.append(snapshot)
    return Trajectory(config=config, snapshots=tuple(out))
