"""HTTP front door for sessions: start, assess, inspect, explain.

Every mutation persists the session before the response is sent, so a crash
immediately after a 2xx can never lose acknowledged state.  Mutations on one
session are serialized with a per-session lock; different sessions proceed in
parallel.
"""

from __future__ import annotations

import logging
import threading

from fastapi import APIRouter, FastAPI, HTTPException, Query, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .config import Config, build_oracle
from .engine import (
    DEFAULT_MAX_DEPTH,
    MAX_MAX_DEPTH,
    AssessmentOutcome,
    Phase,
    Session,
    pending_assessments,
    start_session,
    submit_assessment,
)
from .errors import (
    ConflictingAssessment,
    CorruptLog,
    EmptyQuestion,
    NotFound,
    OracleFailure,
    OracleTimeout,
    StorageFailure,
    UnknownConcept,
)
from .graph import build_graph, render_dot
from .oracle import Oracle
from .path import build_path, explanation_request, flatten_sequence, render_text
from .store import SessionStore

logger = logging.getLogger(__name__)


class StartSessionBody(BaseModel):
    question: str = Field(min_length=1)
    education_level: str = "undergraduate"
    max_depth: int = Field(default=DEFAULT_MAX_DEPTH, ge=1, le=MAX_MAX_DEPTH)


class AssessmentBody(BaseModel):
    concept_id: str = Field(min_length=1)
    known: bool
    force: bool = False


class _SessionLocks:
    """One mutation lock per session id."""

    def __init__(self):
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def lock_for(self, session_id: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(session_id, threading.Lock())


def _http_error(exc: Exception) -> HTTPException:
    if isinstance(exc, HTTPException):
        return exc
    if isinstance(exc, (NotFound, UnknownConcept)):
        return HTTPException(status_code=404, detail=str(exc))
    if isinstance(exc, ConflictingAssessment):
        return HTTPException(status_code=409, detail=str(exc))
    if isinstance(exc, (EmptyQuestion, ValueError)):
        return HTTPException(status_code=422, detail=str(exc))
    if isinstance(exc, OracleTimeout):
        return HTTPException(status_code=504, detail=str(exc))
    if isinstance(exc, OracleFailure):
        return HTTPException(
            status_code=502,
            detail={"message": str(exc), "retryable": exc.retryable},
        )
    if isinstance(exc, (CorruptLog, StorageFailure)):
        return HTTPException(status_code=500, detail=str(exc))
    logger.exception("unhandled error")
    return HTTPException(status_code=500, detail="internal error")


def _pending_view(session: Session) -> list[dict]:
    return [
        {
            "concept": item.concept.key,
            "label": item.concept.label,
            "depth": item.depth,
            "node_id": item.node_id,
        }
        for item in pending_assessments(session)
    ]


def _session_view(session: Session) -> dict:
    analysis = session.analysis
    return {
        "session_id": session.session_id,
        "question": session.question,
        "education_level": session.education_level.value,
        "max_depth": session.max_depth,
        "phase": session.phase.value,
        "created_at": session.created_at,
        "updated_at": session.updated_at,
        "analysis": {
            "understanding": analysis.understanding if analysis else "",
            "importance": analysis.importance if analysis else "",
            "key_concepts": [
                {"key": c.key, "label": c.label} for c in (analysis.key_concepts if analysis else [])
            ],
        },
        "concepts": {
            key: {"label": c.label, "fundamental": c.fundamental}
            for key, c in sorted(session.concepts.items())
        },
        "tree": session.tree.as_dict(),
        "status": session.status.as_dict(),
        "pending": _pending_view(session),
        "sequence": flatten_sequence(session),
    }


def _outcome_view(outcome: AssessmentOutcome) -> dict:
    return {
        "new_concepts": [
            {"key": n.concept, "node_id": n.node_id, "depth": n.depth}
            for n in outcome.new_nodes
        ],
        "duplicate_concepts": [
            {"key": n.concept, "node_id": n.node_id, "depth": n.depth}
            for n in outcome.duplicate_nodes
        ],
        "cap_reason": outcome.cap_reason.value if outcome.cap_reason else None,
        "session_complete": outcome.session_complete,
    }


def create_app(
    config: Config | None = None,
    oracle: Oracle | None = None,
    store: SessionStore | None = None,
) -> FastAPI:
    """Build the service; ``oracle`` and ``store`` are injectable for tests."""
    config = config or Config()
    app = FastAPI(title="prerequisite tracer", version="1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=config.api.cors_origins,
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.config = config
    app.state.oracle = oracle if oracle is not None else build_oracle(config)
    app.state.store = store if store is not None else SessionStore(config.store_dir)
    app.state.locks = _SessionLocks()
    app.state.explanations = {}
    app.state.explanations_guard = threading.Lock()

    def _store() -> SessionStore:
        return app.state.store

    def _oracle() -> Oracle:
        return app.state.oracle

    def _load(session_id: str) -> Session:
        try:
            return _store().load(session_id)
        except (NotFound, CorruptLog, StorageFailure) as exc:
            raise _http_error(exc) from exc

    @app.get("/healthz")
    def healthz() -> dict:
        oracle_obj = _oracle()
        description = oracle_obj.describe()
        healthy = oracle_obj.healthy()
        return {
            "status": "ok" if healthy else "degraded",
            "oracle_mode": description.get("mode", "unknown"),
            "oracle": description,
            "oracle_healthy": healthy,
        }

    api = APIRouter(prefix="/api/v1")

    @api.post("/sessions", status_code=201)
    def create_session(body: StartSessionBody) -> dict:
        try:
            session = start_session(
                body.question,
                body.education_level,
                _oracle(),
                max_depth=body.max_depth,
            )
            _store().save(session)
        except Exception as exc:
            raise _http_error(exc) from exc
        return _session_view(session)

    @api.get("/sessions")
    def list_sessions() -> dict:
        try:
            return {"sessions": _store().list_sessions()}
        except StorageFailure as exc:
            raise _http_error(exc) from exc

    @api.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        return _session_view(_load(session_id))

    @api.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str) -> Response:
        try:
            _store().delete(session_id)
        except (NotFound, StorageFailure) as exc:
            raise _http_error(exc) from exc
        return Response(status_code=204)

    @api.post("/sessions/{session_id}/assessments")
    def assess(session_id: str, body: AssessmentBody) -> dict:
        lock = app.state.locks.lock_for(session_id)
        with lock:
            session = _load(session_id)
            oracle_error: OracleFailure | None = None
            try:
                outcome = submit_assessment(
                    session, body.concept_id, body.known, _oracle(), force=body.force
                )
            except OracleFailure as exc:
                # The assessment itself stuck; persist it before reporting.
                oracle_error = exc
                outcome = None
            except Exception as exc:
                raise _http_error(exc) from exc
            try:
                _store().save(session)
            except StorageFailure as exc:
                raise _http_error(exc) from exc
        if oracle_error is not None:
            raise _http_error(oracle_error) from oracle_error
        return {
            "outcome": _outcome_view(outcome),
            "pending": _pending_view(session),
            "phase": session.phase.value,
            "session": _session_view(session),
        }

    @api.get("/sessions/{session_id}/path", response_model=None)
    def get_path(session_id: str, format: str = Query(default="json")) -> Response | dict:
        session = _load(session_id)
        path = build_path(session)
        if format == "text":
            return Response(content=render_text(path), media_type="text/plain")
        if format != "json":
            raise HTTPException(status_code=422, detail=f"unknown path format {format!r}")
        return path.as_dict()

    @api.get("/sessions/{session_id}/path.txt")
    def get_path_text(session_id: str) -> Response:
        session = _load(session_id)
        return Response(content=render_text(build_path(session)), media_type="text/plain")

    @api.get("/sessions/{session_id}/graph", response_model=None)
    def get_graph(session_id: str, format: str = Query(default="json")) -> Response | dict:
        session = _load(session_id)
        graph = build_graph(session)
        if format == "dot":
            return Response(content=render_dot(graph), media_type="text/vnd.graphviz")
        if format != "json":
            raise HTTPException(status_code=422, detail=f"unknown graph format {format!r}")
        return graph.as_dict()

    @api.post("/sessions/{session_id}/explanation")
    def explain(session_id: str) -> dict:
        session = _load(session_id)
        if len(session.status) == 0:
            raise HTTPException(
                status_code=409,
                detail="no assessments yet: explanations need at least one answer",
            )
        signature = (
            session.session_id,
            tuple(session.status.assessed_items()),
            session.phase.value,
        )
        with app.state.explanations_guard:
            cached = app.state.explanations.get(session_id)
            if cached is not None and cached[0] == signature:
                return {"explanation": cached[1], "cached": True}
        try:
            text = _oracle().generate_explanation(explanation_request(session))
        except OracleFailure as exc:
            raise _http_error(exc) from exc
        with app.state.explanations_guard:
            app.state.explanations[session_id] = (signature, text)
        return {"explanation": text, "cached": False}

    app.include_router(api)
    return app


def main() -> None:
    """Run the service with uvicorn, configured from RPKT_CONFIG if set."""
    import argparse
    import os

    import uvicorn

    from .config import load_config

    parser = argparse.ArgumentParser(description="serve the prerequisite tracer API")
    parser.add_argument("--config", default=os.environ.get("RPKT_CONFIG"))
    parser.add_argument("--host", default=None)
    parser.add_argument("--port", type=int, default=None)
    args = parser.parse_args()

    config = load_config(args.config)
    host = args.host if args.host is not None else config.api.host
    port = args.port if args.port is not None else config.api.port
    uvicorn.run(create_app(config), host=host, port=port)


if __name__ == "__main__":
    main()
