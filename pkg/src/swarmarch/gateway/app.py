"""HTTP surface of the operator gateway.

Endpoints
    POST /sessions                create a session
    GET  /sessions/{id}           current state
    POST /sessions/{id}/events    apply an operator event
    GET  /sessions/{id}/log       append-only event history
    GET  /sessions/{id}/stream    server-sent events: snapshot /
                                  recommendation / decision / error docs

All documents are JSON with lower_snake_case fields and stable ordering.
When GATEWAY_API_KEY is set, every request must carry it in the
``x-api-key`` header.
"""

from __future__ import annotations

import json
import os
import queue
from pathlib import Path

from fastapi import Depends, FastAPI, Header, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, StreamingResponse

from ..engine import ConfigError, RunConfig
from ..model import ControlMode, EnergyModelParams
from .sessions import (
    DEFAULT_TICK_MS,
    EventValidationError,
    PendingDecisionConflict,
    SessionCapacityExceeded,
    SessionManager,
    SessionNotFound,
    SessionPolicy,
)

STREAM_POLL_S = 0.25


def _require_api_key(x_api_key: str | None = Header(default=None)) -> None:
    expected = os.environ.get("GATEWAY_API_KEY")
    if expected and x_api_key != expected:
        raise HTTPException(status_code=401, detail="missing or invalid API key")


def create_app(manager: SessionManager | None = None) -> FastAPI:
    if manager is None:
        log_dir = Path(os.environ.get("GATEWAY_LOG_DIR", "session_logs"))
        manager = SessionManager(log_dir=log_dir)

    app = FastAPI(title="swarmarch operator gateway",
                  dependencies=[Depends(_require_api_key)])
    app.state.manager = manager
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(SessionNotFound)
    async def _not_found(_: Request, exc: SessionNotFound):
        return JSONResponse(status_code=404, content={"error": f"unknown session {exc.args[0]}"})

    @app.exception_handler(PendingDecisionConflict)
    async def _conflict(_: Request, exc: PendingDecisionConflict):
        return JSONResponse(status_code=409, content={"error": str(exc)})

    @app.exception_handler(EventValidationError)
    async def _invalid_event(_: Request, exc: EventValidationError):
        return JSONResponse(status_code=422, content={"error": str(exc), "field": exc.field})

    @app.exception_handler(SessionCapacityExceeded)
    async def _capacity(_: Request, exc: SessionCapacityExceeded):
        return JSONResponse(
            status_code=503,
            content={"error": str(exc)},
            headers={"Retry-After": "5"},
        )

    @app.post("/sessions", status_code=201)
    def create_session(body: dict | None = None):
        body = body or {}
        try:
            mode = ControlMode.parse(str(body.get("mode", "adaptive")))
        except ValueError as exc:
            raise EventValidationError("mode", str(exc))
        try:
            params = EnergyModelParams(**(body.get("params") or {}))
        except (TypeError, ValueError) as exc:
            raise EventValidationError("params", str(exc))
        try:
            policy = SessionPolicy(str(body.get("policy", SessionPolicy.REQUIRE_CONFIRMATION.value)))
        except ValueError:
            raise EventValidationError(
                "policy", f"expected one of {[p.value for p in SessionPolicy]}"
            )
        tick_ms = body.get("tick_ms", DEFAULT_TICK_MS)
        if not isinstance(tick_ms, int) or tick_ms < 1:
            raise EventValidationError("tick_ms", f"must be a positive integer, got {tick_ms!r}")
        config = RunConfig(
            mode=mode,
            params=params,
            initial_size=int(body.get("initial_size", 0)),
        )
        try:
            config.validate()
        except ConfigError as exc:
            raise EventValidationError("config", str(exc))
        session = manager.create(config, policy=policy, tick_ms=tick_ms)
        return {"session_id": session.id, "state": session.state_document()}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return manager.get(session_id).state_document()

    @app.post("/sessions/{session_id}/events")
    def post_event(session_id: str, event: dict):
        return manager.get(session_id).handle_event(event)

    @app.get("/sessions/{session_id}/log")
    def get_log(session_id: str):
        return {"events": manager.get(session_id).history}

    @app.get("/sessions/{session_id}/stream")
    def stream(session_id: str):
        session = manager.get(session_id)
        sub_id, q = session.subscribe()

        def frames():
            try:
                while True:
                    try:
                        doc = q.get(timeout=STREAM_POLL_S)
                    except queue.Empty:
                        yield ": keep-alive\n\n"
                        continue
                    yield f"data: {json.dumps(doc)}\n\n"
                    if doc.get("type") == "error":
                        return
            finally:
                session.unsubscribe(sub_id)

        return StreamingResponse(frames(), media_type="text/event-stream")

    return app
