"""Deterministic drone-swarm control-architecture simulator and decision system."""

from .decision import (
    CommQuality,
    FailureProbability,
    MissionContext,
    Recommendation,
    Scenario,
    SizeClass,
    Status,
    classify_size,
    decide,
    recommend,
)
from .engine import ConfigError, RunConfig, Trajectory, adaptive_select, run, step
from .metrics import (
    EnergySummary,
    RunReport,
    ScalabilitySummary,
    build_report,
    radar_scores,
    summarize_energy,
    summarize_scalability,
)
from .model import (
    ArchitectureKind,
    ControlMode,
    DroneState,
    EnergyModelParams,
    SwarmSnapshot,
    is_connected,
    per_drone_energy,
)

__version__ = "0.1.0"

__all__ = [
    "ArchitectureKind",
    "CommQuality",
    "ConfigError",
    "ControlMode",
    "DroneState",
    "EnergyModelParams",
    "EnergySummary",
    "FailureProbability",
    "MissionContext",
    "Recommendation",
    "RunConfig",
    "RunReport",
    "ScalabilitySummary",
    "Scenario",
    "SizeClass",
    "Status",
    "SwarmSnapshot",
    "Trajectory",
    "adaptive_select",
    "build_report",
    "classify_size",
    "decide",
    "is_connected",
    "per_drone_energy",
    "radar_scores",
    "recommend",
    "run",
    "step",
    "summarize_energy",
    "summarize_scalability",
]
