"""Live operator gateway: session-based stepping simulation with streamed
state feedback and human-confirmed architecture changes."""

from .sessions import (
    EventValidationError,
    PendingDecisionConflict,
    Session,
    SessionCapacityExceeded,
    SessionManager,
    SessionNotFound,
    SessionPolicy,
    replay_records,
)

__all__ = [
    "EventValidationError",
    "PendingDecisionConflict",
    "Session",
    "SessionCapacityExceeded",
    "SessionManager",
    "SessionNotFound",
    "SessionPolicy",
    "replay_records",
]
