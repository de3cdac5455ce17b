"""Domain types and the per-drone energy / connectivity laws.

Three control architectures are modelled. Per-drone communication cost per
iteration depends on the architecture and the swarm size N:

* centralized:  k_o + k_ce * N          (every drone talks to mission control)
* hierarchical: k_o + k_hi * sqrt(N)    (cluster heads; active only for N >= n_hier_min)
* holonic:      k_o + k_ho              (neighbour-only; active only for N >= n_holonic_min)

Below its formation minimum an architecture cannot form structured
communication: drones still burn the fixed operational cost k_o and the
swarm counts as disconnected.

Everything in this module is an immutable value or a pure function; it is
safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum


class ArchitectureKind(str, Enum):
    """The three swarm control architectures."""

    CENTRALIZED = "centralized"
    HIERARCHICAL = "hierarchical"
    HOLONIC = "holonic"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


@dataclass(frozen=True)
class ControlMode:
    """Run mode: pinned to one architecture, or re-selected each iteration.

    ``architecture is None`` means adaptive. A run's mode is fixed at run
    start; under a static mode the active architecture never changes.
    """

    architecture: ArchitectureKind | None = None

    @classmethod
    def static(cls, architecture: ArchitectureKind) -> "ControlMode":
        return cls(architecture=architecture)

    @classmethod
    def adaptive(cls) -> "ControlMode":
        return cls(architecture=None)

    @property
    def is_adaptive(self) -> bool:
        return self.architecture is None

    @classmethod
    def parse(cls, name: str) -> "ControlMode":
        """Parse ``centralized | hierarchical | holonic | adaptive``."""
        cleaned = name.strip().lower()
        if cleaned == "adaptive":
            return cls.adaptive()
        try:
            return cls.static(ArchitectureKind(cleaned))
        except ValueError:
            valid = [a.value for a in ArchitectureKind] + ["adaptive"]
            raise ValueError(f"unknown mode {name!r}; expected one of {valid}") from None

    @property
    def name(self) -> str:
        return "adaptive" if self.is_adaptive else self.architecture.value


@dataclass(frozen=True)
class EnergyModelParams:
    """All energy-model constants in one configurable record.

    Units are W-units per iteration, treated as a depletable budget; the
    battery capacity uses the same loose W-unit.
    """

    k_o: float = 10.0              # fixed operational cost per drone per iteration
    k_ce: float = 5.0              # centralized comm coefficient (per drone of swarm size)
    k_hi: float = 3.0              # hierarchical comm coefficient (per sqrt(swarm size))
    k_ho: float = 1.0              # holonic comm constant
    capacity_b: float = 700.0      # initial battery budget per drone
    n_hier_min: int = 14           # minimum formation size, hierarchical
    n_holonic_min: int = 42        # minimum formation size, holonic
    drones_added_per_iteration: int = 2

    def __post_init__(self) -> None:
        for name in ("k_o", "k_ce", "k_hi", "k_ho", "capacity_b"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.capacity_b <= self.k_o:
            raise ValueError(
                f"capacity_b ({self.capacity_b}) must exceed k_o ({self.k_o}): "
                "a fresh drone must survive at least one iteration"
            )
        if not 0 < self.n_hier_min < self.n_holonic_min:
            raise ValueError(
                f"formation minimums must satisfy 0 < n_hier_min < n_holonic_min, "
                f"got {self.n_hier_min} / {self.n_holonic_min}"
            )
        if self.drones_added_per_iteration < 0:
            raise ValueError("drones_added_per_iteration must be >= 0")


@dataclass(frozen=True)
class DroneState:
    """One drone: identity, remaining battery budget, creation iteration."""

    id: int
    battery: float
    born_at: int


@dataclass(frozen=True)
class SwarmSnapshot:
    """Full simulator state at the end of one iteration.

    ``drones`` holds the survivors; drones that depleted during the
    iteration are gone and counted in ``depleted_this_iteration``.
    ``per_drone_energy`` is the energy assessed against every drone present
    after the addition phase; ``total_energy`` is the energy actually
    drained from batteries this iteration (a depleted drone contributes
    only its remaining charge, so batteries never go negative).
    """

    iteration: int
    drones: tuple[DroneState, ...]
    active_architecture: ArchitectureKind
    connected: bool
    per_drone_energy: float
    total_energy: float
    depleted_this_iteration: int = 0

    @property
    def size(self) -> int:
        return len(self.drones)


def per_drone_energy(arch: ArchitectureKind, n: int, params: EnergyModelParams) -> float:
    """Energy one drone spends in an iteration with swarm size ``n``.

    Below the formation minimum (hierarchical/holonic) drones cannot
    communicate and only the operational cost ``k_o`` applies.
    """
    if n < 1:
        raise ValueError(f"per-drone energy undefined for empty swarm (n={n})")
    if arch is ArchitectureKind.CENTRALIZED:
        return params.k_o + params.k_ce * n
    if arch is ArchitectureKind.HIERARCHICAL:
        if n >= params.n_hier_min:
            return params.k_o + params.k_hi * math.sqrt(n)
        return params.k_o
    if n >= params.n_holonic_min:
        return params.k_o + params.k_ho
    return params.k_o


def is_connected(arch: ArchitectureKind, n: int, params: EnergyModelParams) -> bool:
    """Whether structured communication is active at swarm size ``n``."""
    if n < 0:
        raise ValueError(f"swarm size must be >= 0, got {n}")
    if n == 0:
        return False
    if arch is ArchitectureKind.CENTRALIZED:
        return True
    if arch is ArchitectureKind.HIERARCHICAL:
        return n >= params.n_hier_min
    return n >= params.n_holonic_min
