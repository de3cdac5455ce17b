"""Session state machine for the human-in-the-loop workflow.

A session wraps one live stepping simulation. The operator assigns tasks
or posts swarm status; the decision engine answers with an architecture
recommendation which is either applied immediately (auto-apply policy) or
parked as pending until the operator accepts or overrides it. Stepping
advances the simulation under the currently applied architecture; sessions
created in adaptive mode with auto-apply re-select per iteration until a
recommendation pins an architecture.

Every state-mutating action is appended to the session's event log (one
JSON record per line). Replaying a log against a fresh session with the
same config reproduces the identical snapshot sequence; recommendations
are replayed from the log rather than re-derived, so replay is exact even
when the original answers came from an external backend.

Within one session all mutations are serialized under a lock; distinct
sessions share nothing. Subscribers receive every snapshot,
recommendation and decision in order through bounded queues; a subscriber
that falls too far behind is disconnected and may resubscribe to resync
from the latest snapshot.
"""

from __future__ import annotations

import json
import queue
import secrets
import threading
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from ..decision import (
    MissionContext,
    Recommendation,
    Scenario,
    SizeClass,
    Status,
    CommQuality,
    FailureProbability,
    classify_size,
    context_document,
    decide,
    parse_context,
    parse_recommendation,
    recommendation_document,
)
from ..engine import RunConfig, initial_snapshot, step
from ..model import ArchitectureKind, ControlMode, EnergyModelParams, SwarmSnapshot

DEFAULT_TICK_MS = 500
SUBSCRIBER_BUFFER = 256


class SessionPolicy(str, Enum):
    AUTO_APPLY = "auto_apply"
    REQUIRE_CONFIRMATION = "require_confirmation"


class SessionNotFound(KeyError):
    pass


class SessionCapacityExceeded(RuntimeError):
    def __init__(self, limit: int):
        super().__init__(
            f"session capacity ({limit}) exceeded; close a session and retry shortly"
        )


class PendingDecisionConflict(RuntimeError):
    def __init__(self):
        super().__init__("no recommendation is pending for this session")


class EventValidationError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def config_document(config: RunConfig) -> dict:
    p = config.params
    return {
        "mode": config.mode.name,
        "initial_size": config.initial_size,
        "iterations": config.iterations,
        "seed": config.seed,
        "params": {
            "k_o": p.k_o,
            "k_ce": p.k_ce,
            "k_hi": p.k_hi,
            "k_ho": p.k_ho,
            "capacity_b": p.capacity_b,
            "n_hier_min": p.n_hier_min,
            "n_holonic_min": p.n_holonic_min,
            "drones_added_per_iteration": p.drones_added_per_iteration,
        },
    }


def parse_config(doc: dict) -> RunConfig:
    return RunConfig(
        mode=ControlMode.parse(doc["mode"]),
        params=EnergyModelParams(**doc["params"]),
        initial_size=doc.get("initial_size", 0),
        iterations=doc.get("iterations", 150),
        seed=doc.get("seed", 0),
    )


def snapshot_document(snap: SwarmSnapshot) -> dict:
    return {
        "type": "snapshot",
        "iteration": snap.iteration,
        "swarm_size": snap.size,
        "architecture": snap.active_architecture.value,
        "connected": snap.connected,
        "per_drone_energy_w": round(snap.per_drone_energy, 3),
        "total_energy_w": round(snap.total_energy, 3),
        "depleted": snap.depleted_this_iteration,
    }


class Session:
    """One live simulation plus its operator-facing state."""

    def __init__(
        self,
        session_id: str,
        config: RunConfig,
        policy: SessionPolicy,
        tick_ms: int = DEFAULT_TICK_MS,
        log_path: Path | None = None,
        backend=None,
        _replay: bool = False,
    ):
        config.validate()
        self.id = session_id
        self.config = config
        self.policy = policy
        self.tick_ms = tick_ms
        self.backend = backend
        self.log_path = log_path
        self._replay = _replay

        self._lock = threading.RLock()
        self.snapshot, self.next_id = initial_snapshot(config, iteration=0)
        self.snapshot_history: list[SwarmSnapshot] = [self.snapshot]
        self.pending: Recommendation | None = None
        self.override_architecture: ArchitectureKind | None = None
        self.last_context: MissionContext | None = None
        self.last_size_class: SizeClass | None = None
        self.running = False
        self.closed = False
        self._ticker: threading.Thread | None = None
        self._seq = 0
        self.history: list[dict] = []
        self._subscribers: dict[int, queue.Queue] = {}
        self._next_subscriber = 0

        self._record("created", config=config_document(config),
                     policy=policy.value, tick_ms=tick_ms)

    # ----- event log -------------------------------------------------

    def _record(self, record_type: str, **payload) -> dict:
        record = {"seq": self._seq, "ts": round(time.time(), 3), "type": record_type}
        record.update(payload)
        self._seq += 1
        self.history.append(record)
        if self.log_path is not None:
            with self.log_path.open("a") as fh:
                fh.write(json.dumps(record) + "\n")
        return record

    # ----- fan-out ----------------------------------------------------

    def subscribe(self) -> tuple[int, "queue.Queue[dict]"]:
        """Register a subscriber; first delivery is a sync snapshot."""
        with self._lock:
            sub_id = self._next_subscriber
            self._next_subscriber += 1
            q: queue.Queue = queue.Queue(maxsize=SUBSCRIBER_BUFFER)
            q.put(snapshot_document(self.snapshot))
            self._subscribers[sub_id] = q
            return sub_id, q

    def unsubscribe(self, sub_id: int) -> None:
        with self._lock:
            self._subscribers.pop(sub_id, None)

    def _broadcast(self, doc: dict) -> None:
        dropped = []
        for sub_id, q in self._subscribers.items():
            try:
                q.put_nowait(doc)
            except queue.Full:
                dropped.append(sub_id)
        for sub_id in dropped:
            q = self._subscribers.pop(sub_id)
            try:
                q.get_nowait()  # make room for the disconnect notice
            except queue.Empty:
                pass
            q.put_nowait({"type": "error",
                          "message": "subscriber buffer overflow; resubscribe to resync"})

    # ----- state ------------------------------------------------------

    def state_document(self) -> dict:
        with self._lock:
            doc = {
                "session_id": self.id,
                "iteration": self.snapshot.iteration,
                "swarm_size": self.snapshot.size,
                "architecture": self.snapshot.active_architecture.value,
                "connected": self.snapshot.connected,
                "per_drone_energy_w": round(self.snapshot.per_drone_energy, 3),
                "total_energy_w": round(self.snapshot.total_energy, 3),
                "depleted": self.snapshot.depleted_this_iteration,
                "mode": "running" if self.running else "paused",
                "tick_ms": self.tick_ms,
                "policy": self.policy.value,
                "pending": recommendation_document(self.pending) if self.pending else None,
                "configured_mode": self.config.mode.name,
            }
            return doc

    def _stepping_mode(self) -> ControlMode:
        if self.override_architecture is not None:
            return ControlMode.static(self.override_architecture)
        if self.config.mode.is_adaptive and self.policy is SessionPolicy.AUTO_APPLY:
            return ControlMode.adaptive()
        if self.config.mode.is_adaptive:
            # confirmation policy: architecture only moves via operator decisions
            return ControlMode.static(self.snapshot.active_architecture)
        return self.config.mode

    # ----- recommendation plumbing -------------------------------------

    def _apply_recommendation(self, rec: Recommendation) -> bool:
        """Apply or park a recommendation; returns True when applied now."""
        if self.policy is SessionPolicy.AUTO_APPLY:
            self.override_architecture = rec.architecture
            self.pending = None
            return True
        self.pending = rec  # replaces any stale pending recommendation
        return False

    def _emit_recommendation(self, rec: Recommendation, applied: bool) -> None:
        doc = recommendation_document(rec)
        doc = {"type": "recommendation", **doc, "applied": applied,
               "pending": not applied}
        self._broadcast(doc)

    def _recommend_for_context(self, ctx: MissionContext) -> Recommendation:
        return decide(ctx, self.backend)

    def _handle_context_event(self, event_type: str, ctx: MissionContext) -> Recommendation:
        rec = self._recommend_for_context(ctx)
        applied = self._apply_recommendation(rec)
        self.last_context = ctx
        self.last_size_class = ctx.size_class
        self._record(event_type, context=context_document(ctx),
                     recommendation=recommendation_document(rec), applied=applied)
        self._emit_recommendation(rec, applied)
        return rec

    def _auto_reevaluate(self) -> None:
        """Re-run the recommender when the live size class changes."""
        if self._replay or self.last_context is None:
            return
        new_class = classify_size(self.snapshot.size, self.config.params)
        if new_class == self.last_size_class:
            return
        ctx = MissionContext(
            scenario=self.last_context.scenario,
            status=self.last_context.status,
            size_class=new_class,
            comm_quality=self.last_context.comm_quality,
            failure_probability=self.last_context.failure_probability,
        )
        rec = self._recommend_for_context(ctx)
        applied = self._apply_recommendation(rec)
        self.last_context = ctx
        self.last_size_class = new_class
        self._record("auto_recommendation", context=context_document(ctx),
                     recommendation=recommendation_document(rec), applied=applied)
        self._emit_recommendation(rec, applied)

    # ----- stepping -----------------------------------------------------

    def _advance_one(self, *, record: bool = True) -> SwarmSnapshot:
        self.snapshot, self.next_id = step(
            self.snapshot, self._stepping_mode(), self.config.params, self.next_id
        )
        self.snapshot_history.append(self.snapshot)
        if record:
            self._record("step")
        self._broadcast(snapshot_document(self.snapshot))
        self._auto_reevaluate()
        return self.snapshot

    def _tick_loop(self) -> None:
        while True:
            time.sleep(self.tick_ms / 1000.0)
            with self._lock:
                if not self.running or self.closed:
                    return
                self._advance_one()

    # ----- operator events ----------------------------------------------

    def handle_event(self, event: dict) -> dict:
        """Apply one operator event; returns an acknowledgment document."""
        if not isinstance(event, dict):
            raise EventValidationError("event", "must be a JSON object")
        event_type = event.get("type")
        with self._lock:
            if event_type == "assign_task":
                ctx = self._context_from_event(event, subject_field="scenario")
                rec = self._handle_context_event("assign_task", ctx)
                return self._ack(recommendation=rec)
            if event_type == "post_status":
                ctx = self._context_from_event(event, subject_field="status")
                rec = self._handle_context_event("post_status", ctx)
                return self._ack(recommendation=rec)
            if event_type == "decision":
                return self._handle_decision(event)
            if event_type == "step":
                count = event.get("count", 1)
                if not isinstance(count, int) or count < 1:
                    raise EventValidationError("count", f"must be a positive integer, got {count!r}")
                for _ in range(count):
                    self._advance_one()
                return self._ack()
            if event_type == "pause":
                self.running = False
                self._record("pause")
                return self._ack()
            if event_type == "resume":
                tick_ms = event.get("tick_ms")
                if tick_ms is not None:
                    if not isinstance(tick_ms, int) or tick_ms < 1:
                        raise EventValidationError("tick_ms", f"must be a positive integer, got {tick_ms!r}")
                    self.tick_ms = tick_ms
                self._record("resume", tick_ms=self.tick_ms)
                self._start_ticker()
                return self._ack()
            raise EventValidationError(
                "type",
                f"unknown event type {event_type!r}; expected one of "
                "assign_task, post_status, decision, step, pause, resume",
            )

    def _context_from_event(self, event: dict, subject_field: str) -> MissionContext:
        def required(field: str, enum_cls):
            raw = event.get(field)
            if raw is None:
                raise EventValidationError(field, "is required")
            try:
                return enum_cls(str(raw))
            except ValueError:
                valid = [e.value for e in enum_cls]
                raise EventValidationError(field, f"unknown value {raw!r}; expected one of {valid}")

        subject_cls = Scenario if subject_field == "scenario" else Status
        subject = required(subject_field, subject_cls)
        return MissionContext(
            scenario=subject if subject_field == "scenario" else None,
            status=subject if subject_field == "status" else None,
            size_class=classify_size(self.snapshot.size, self.config.params),
            comm_quality=required("comm_quality", CommQuality),
            failure_probability=required("failure_probability", FailureProbability),
        )

    def _handle_decision(self, event: dict) -> dict:
        if self.pending is None:
            raise PendingDecisionConflict()
        action = event.get("action")
        if action == "accept":
            architecture = self.pending.architecture
        elif action == "override":
            raw = event.get("architecture")
            if raw is None:
                raise EventValidationError("architecture", "is required for an override")
            try:
                architecture = ArchitectureKind(str(raw).strip().lower())
            except ValueError:
                valid = [a.value for a in ArchitectureKind]
                raise EventValidationError(
                    "architecture", f"unknown value {raw!r}; expected one of {valid}"
                )
        else:
            raise EventValidationError("action", f"must be accept or override, got {action!r}")

        recommended = self.pending.architecture
        self.override_architecture = architecture
        self.pending = None
        self._record(
            "decision",
            action=action,
            architecture=architecture.value,
            recommended=recommended.value,
            diverged=architecture is not recommended,
        )
        self._broadcast({
            "type": "decision",
            "action": action,
            "architecture": architecture.value,
            "recommended": recommended.value,
        })
        return self._ack()

    def _ack(self, recommendation: Recommendation | None = None) -> dict:
        return {
            "ok": True,
            "recommendation": recommendation_document(recommendation)
            if recommendation else None,
            "state": self.state_document(),
        }

    def _start_ticker(self) -> None:
        self.running = True
        if self._ticker is None or not self._ticker.is_alive():
            self._ticker = threading.Thread(
                target=self._tick_loop, name=f"session-{self.id}-ticker", daemon=True
            )
            self._ticker.start()

    def close(self) -> None:
        with self._lock:
            self.running = False
            self.closed = True


class SessionManager:
    """Creates, indexes and caps live sessions."""

    def __init__(self, log_dir: Path | None = None, max_sessions: int = 64, backend=None):
        self.log_dir = Path(log_dir) if log_dir is not None else None
        if self.log_dir is not None:
            self.log_dir.mkdir(parents=True, exist_ok=True)
        self.max_sessions = max_sessions
        self.backend = backend
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(
        self,
        config: RunConfig,
        policy: SessionPolicy = SessionPolicy.REQUIRE_CONFIRMATION,
        tick_ms: int = DEFAULT_TICK_MS,
    ) -> Session:
        with self._lock:
            if len(self._sessions) >= self.max_sessions:
                raise SessionCapacityExceeded(self.max_sessions)
            session_id = secrets.token_hex(8)
            log_path = (
                self.log_dir / f"{session_id}.jsonl" if self.log_dir is not None else None
            )
            session = Session(
                session_id, config, policy, tick_ms=tick_ms,
                log_path=log_path, backend=self.backend,
            )
            self._sessions[session_id] = session
            return session

    def get(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise SessionNotFound(session_id) from None

    def close_all(self) -> None:
        with self._lock:
            for session in self._sessions.values():
                session.close()


def replay_records(records: list[dict]) -> list[SwarmSnapshot]:
    """Rebuild the snapshot sequence a logged session produced.

    Recommendations and decisions are applied from the log, never
    re-derived, so replay is deterministic regardless of the backend the
    live session used. Pause/resume records carry no state and are
    skipped; every executed iteration appears as its own step record.
    """
    if not records or records[0].get("type") != "created":
        raise ValueError("event log must start with a 'created' record")
    created = records[0]
    config = parse_config(created["config"])
    policy = SessionPolicy(created["policy"])
    session = Session(
        "replay", config, policy, tick_ms=created.get("tick_ms", DEFAULT_TICK_MS),
        log_path=None, _replay=True,
    )
    for record in records[1:]:
        record_type = record["type"]
        if record_type == "step":
            session._advance_one(record=False)
        elif record_type in ("assign_task", "post_status", "auto_recommendation"):
            rec = parse_recommendation(record["recommendation"])
            ctx = parse_context(record["context"])
            if record["applied"]:
                session.override_architecture = rec.architecture
                session.pending = None
            else:
                session.pending = rec
            session.last_context = ctx
            session.last_size_class = ctx.size_class
        elif record_type == "decision":
            session.override_architecture = ArchitectureKind(record["architecture"])
            session.pending = None
        elif record_type in ("pause", "resume"):
            continue
        else:
            raise ValueError(f"unknown record type {record_type!r} in event log")
    return session.snapshot_history


def load_records(path: Path) -> list[dict]:
    return [json.loads(line) for line in path.read_text().splitlines() if line.strip()]
