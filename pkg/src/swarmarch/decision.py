"""Mission-context architecture recommendation.

A fixed twelve-row policy table maps mission scenarios and swarm status
reports -- qualified by swarm size class, communication quality and
failure probability -- to a recommended control architecture. Contexts
not covered by an explicit row fall through a priority chain:

1. high failure probability        -> holonic (fault tolerant)
2. low communication quality       -> holonic (neighbour-only comms)
3. large swarm                     -> holonic
4. medium swarm                    -> hierarchical
5. otherwise                       -> centralized

``recommend`` is total and deterministic. ``decide`` additionally consults
a pluggable backend (e.g. an external language-model service) and falls
back to the rule table whenever the backend fails or answers outside the
response schema.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Protocol

from .model import ArchitectureKind, EnergyModelParams

logger = logging.getLogger(__name__)

FALLBACK = "fallback"
EXTERNAL = "external-model"


class Scenario(str, Enum):
    SEARCH_AND_RESCUE = "search_and_rescue"
    LARGE_AREA_MAPPING = "large_area_mapping"
    EMERGENCY_SUPPLY_DELIVERY = "emergency_supply_delivery"
    POST_DISASTER_ASSESSMENT = "post_disaster_assessment"


class Status(str, Enum):
    CRITICAL_FAILURE = "critical_failure"
    IDLE_STATE = "idle_state"
    SPREAD_OUT = "spread_out"
    OVERLOAD = "overload"


class SizeClass(str, Enum):
    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"


class CommQuality(str, Enum):
    GOOD = "good"
    MODERATE = "moderate"
    LOW = "low"


class FailureProbability(str, Enum):
    LOW = "low"
    MODERATE = "moderate"
    HIGH = "high"


class RecommendationSource(str, Enum):
    RULE_TABLE = "rule_table"
    EXTERNAL_MODEL = "external_model"


@dataclass(frozen=True)
class MissionContext:
    """Inputs to a recommendation: exactly one of scenario/status, plus
    size class, communication quality and failure probability."""

    size_class: SizeClass
    comm_quality: CommQuality
    failure_probability: FailureProbability
    scenario: Scenario | None = None
    status: Status | None = None

    def __post_init__(self) -> None:
        if (self.scenario is None) == (self.status is None):
            raise ValueError("exactly one of scenario or status must be set")

    @property
    def kind(self) -> str:
        return "task" if self.scenario is not None else "status"

    @property
    def subject(self) -> str:
        return (self.scenario or self.status).value


@dataclass(frozen=True)
class Recommendation:
    architecture: ArchitectureKind
    matched_rule: str  # rule id, FALLBACK, or EXTERNAL
    rationale: str
    source: RecommendationSource = RecommendationSource.RULE_TABLE


@dataclass(frozen=True)
class Rule:
    id: str
    scenario: Scenario | None
    status: Status | None
    size_class: SizeClass
    comm_quality: CommQuality
    failure_probability: FailureProbability
    architecture: ArchitectureKind
    rationale: str

    def key(self) -> tuple:
        subject = self.scenario if self.scenario is not None else self.status
        return (subject, self.size_class, self.comm_quality, self.failure_probability)


def _task(id_, scenario, size, comm, fail, arch, why) -> Rule:
    return Rule(id_, scenario, None, size, comm, fail, arch, why)


def _status(id_, status, size, comm, fail, arch, why) -> Rule:
    return Rule(id_, None, status, size, comm, fail, arch, why)


S, M, L = SizeClass.SMALL, SizeClass.MEDIUM, SizeClass.LARGE
GOOD, MOD, LOW = CommQuality.GOOD, CommQuality.MODERATE, CommQuality.LOW
FP_LOW, FP_MOD, FP_HIGH = (
    FailureProbability.LOW,
    FailureProbability.MODERATE,
    FailureProbability.HIGH,
)
CEN, HIE, HOL = (
    ArchitectureKind.CENTRALIZED,
    ArchitectureKind.HIERARCHICAL,
    ArchitectureKind.HOLONIC,
)

RULE_TABLE: tuple[Rule, ...] = (
    _task("T1", Scenario.SEARCH_AND_RESCUE, S, GOOD, FP_LOW, CEN,
          "small SAR swarm with good links: direct central coordination"),
    _task("T2", Scenario.SEARCH_AND_RESCUE, L, LOW, FP_HIGH, HOL,
          "large SAR swarm under degraded links and high failure risk: self-organizing teams"),
    _task("T3", Scenario.LARGE_AREA_MAPPING, S, GOOD, FP_LOW, HIE,
          "mapping benefits from clustered sweep patterns even at small scale"),
    _task("T4", Scenario.LARGE_AREA_MAPPING, L, MOD, FP_MOD, HOL,
          "large mapping swarm with moderate links: neighbour-level coordination scales"),
    _task("T5", Scenario.EMERGENCY_SUPPLY_DELIVERY, M, GOOD, FP_LOW, HIE,
          "medium delivery swarm: cluster heads route corridors efficiently"),
    _task("T6", Scenario.EMERGENCY_SUPPLY_DELIVERY, L, LOW, FP_HIGH, HOL,
          "large delivery swarm under poor links and high risk: fault-tolerant holons"),
    _task("T7", Scenario.POST_DISASTER_ASSESSMENT, M, GOOD, FP_LOW, HIE,
          "medium assessment swarm: layered reporting through cluster heads"),
    _task("T8", Scenario.POST_DISASTER_ASSESSMENT, L, LOW, FP_HIGH, HOL,
          "large assessment swarm in degraded conditions: decentralized resilience"),
    _status("S1", Status.CRITICAL_FAILURE, S, LOW, FP_HIGH, HIE,
            "critical failure in a small swarm: clusters isolate faults while keeping oversight"),
    _status("S2", Status.IDLE_STATE, S, GOOD, FP_LOW, CEN,
            "idle small swarm with good links: cheapest to hold under central control"),
    _status("S3", Status.SPREAD_OUT, M, MOD, FP_MOD, HIE,
            "spread-out medium swarm: cluster heads re-establish structure"),
    _status("S4", Status.OVERLOAD, L, LOW, FP_HIGH, HOL,
            "overloaded large swarm under poor links: shed load into autonomous holons"),
)

_RULE_INDEX = {rule.key(): rule for rule in RULE_TABLE}


def classify_size(n: int, params: EnergyModelParams) -> SizeClass:
    """Bridge a numeric swarm size to the policy table's size classes.

    Boundaries reuse the formation minimums so the recommender and the
    simulator never disagree about what small/medium/large means.
    """
    if n < 0:
        raise ValueError(f"swarm size must be >= 0, got {n}")
    if n < params.n_hier_min:
        return SizeClass.SMALL
    if n < params.n_holonic_min:
        return SizeClass.MEDIUM
    return SizeClass.LARGE


def recommend(ctx: MissionContext) -> Recommendation:
    """Total, deterministic recommendation for any mission context."""
    subject = ctx.scenario if ctx.scenario is not None else ctx.status
    rule = _RULE_INDEX.get(
        (subject, ctx.size_class, ctx.comm_quality, ctx.failure_probability)
    )
    if rule is not None:
        return Recommendation(
            architecture=rule.architecture,
            matched_rule=rule.id,
            rationale=rule.rationale,
        )
    if ctx.failure_probability is FP_HIGH:
        arch, why = HOL, "high failure probability favors fault-tolerant holonic control"
    elif ctx.comm_quality is LOW:
        arch, why = HOL, "low communication quality favors neighbour-only holonic control"
    elif ctx.size_class is L:
        arch, why = HOL, "large swarms scale best under holonic control"
    elif ctx.size_class is M:
        arch, why = HIE, "medium swarms balance oversight and scale under hierarchical control"
    else:
        arch, why = CEN, "small swarm with workable links defaults to centralized control"
    return Recommendation(
        architecture=arch,
        matched_rule=FALLBACK,
        rationale=f"no exact policy row; {why}",
    )


class DecisionBackend(Protocol):
    """Port for an external recommendation service.

    ``propose`` returns the raw architecture string the service produced;
    it may raise on transport failure or timeout. Validation against the
    response schema happens in :func:`decide`.
    """

    def propose(self, ctx: MissionContext) -> str: ...


def _parse_architecture(raw: str) -> ArchitectureKind | None:
    cleaned = raw.strip().lower()
    try:
        return ArchitectureKind(cleaned)
    except ValueError:
        return None


def decide(ctx: MissionContext, backend: DecisionBackend | None = None) -> Recommendation:
    """Recommendation via the configured backend, rule table as safety net.

    An external answer is accepted only if it names exactly one of the
    three architectures; on timeout, transport failure or schema violation
    the rule table answers and the rationale notes the fallback. Callers
    never see a backend error.
    """
    if backend is None:
        return recommend(ctx)
    try:
        raw = backend.propose(ctx)
    except Exception as exc:
        logger.warning("decision backend failed (%s); using rule table", exc)
        base = recommend(ctx)
        return Recommendation(
            architecture=base.architecture,
            matched_rule=base.matched_rule,
            rationale=f"{base.rationale} (external backend unavailable: {exc})",
        )
    arch = _parse_architecture(raw)
    if arch is None:
        logger.warning("decision backend reply %r violates schema; using rule table", raw)
        base = recommend(ctx)
        return Recommendation(
            architecture=base.architecture,
            matched_rule=base.matched_rule,
            rationale=f"{base.rationale} (external reply rejected by schema)",
        )
    return Recommendation(
        architecture=arch,
        matched_rule=EXTERNAL,
        rationale="external model selection accepted under response schema",
        source=RecommendationSource.EXTERNAL_MODEL,
    )


def context_document(ctx: MissionContext) -> dict:
    """Wire form of a mission context (lower_snake_case, stable order)."""
    doc: dict = {"kind": ctx.kind}
    if ctx.scenario is not None:
        doc["scenario"] = ctx.scenario.value
    else:
        doc["status"] = ctx.status.value
    doc["size_class"] = ctx.size_class.value
    doc["comm_quality"] = ctx.comm_quality.value
    doc["failure_probability"] = ctx.failure_probability.value
    return doc


def parse_context(doc: dict) -> MissionContext:
    return MissionContext(
        scenario=Scenario(doc["scenario"]) if "scenario" in doc else None,
        status=Status(doc["status"]) if "status" in doc else None,
        size_class=SizeClass(doc["size_class"]),
        comm_quality=CommQuality(doc["comm_quality"]),
        failure_probability=FailureProbability(doc["failure_probability"]),
    )


def recommendation_document(rec: Recommendation) -> dict:
    return {
        "architecture": rec.architecture.value,
        "matched_rule": rec.matched_rule,
        "rationale": rec.rationale,
        "source": rec.source.value,
    }


def parse_recommendation(doc: dict) -> Recommendation:
    return Recommendation(
        architecture=ArchitectureKind(doc["architecture"]),
        matched_rule=doc["matched_rule"],
        rationale=doc["rationale"],
        source=RecommendationSource(doc["source"]),
    )


def rule_table_document() -> dict:
    """The active policy as a plain document, for operator audit."""
    return {
        "rows": [
            {
                "id": rule.id,
                "kind": "task" if rule.scenario is not None else "status",
                "subject": (rule.scenario or rule.status).value,
                "size_class": rule.size_class.value,
                "comm_quality": rule.comm_quality.value,
                "failure_probability": rule.failure_probability.value,
                "architecture": rule.architecture.value,
                "rationale": rule.rationale,
            }
            for rule in RULE_TABLE
        ],
        "fallback_chain": [
            "failure_probability=high -> holonic",
            "comm_quality=low -> holonic",
            "size_class=large -> holonic",
            "size_class=medium -> hierarchical",
            "otherwise -> centralized",
        ],
    }


def export_rule_table(path: str | Path) -> None:
    """Write the policy table to a human-auditable JSON file."""
    Path(path).write_text(json.dumps(rule_table_document(), indent=2) + "\n")
