"""Recursive prerequisite tracing: find what a learner is missing before a question.

A session analyzes one question into key concepts, asks the learner to mark
each know / don't-know, recursively expands unknown concepts into their
prerequisites down to a depth bound, and flattens the result into a
prerequisites-first learning path.
"""

from .concepts import (
    Concept,
    Expansion,
    KnowledgeStatus,
    Occurrence,
    Status,
    TraceNode,
    TraceTree,
    normalize_label,
)
from .engine import (
    DEFAULT_MAX_DEPTH,
    AssessmentOutcome,
    CapReason,
    EventKind,
    PendingAssessment,
    Phase,
    Session,
    SessionEvent,
    check_invariants,
    is_complete,
    pending_assessments,
    replay,
    session_from_snapshot,
    snapshot,
    start_session,
    submit_assessment,
)
from .errors import (
    ConflictingAssessment,
    CorruptLog,
    CycleDetected,
    DepthExceeded,
    EmptyLabel,
    EmptyQuestion,
    FixtureInvalid,
    InvalidSession,
    MalformedResponse,
    NotFound,
    OracleFailure,
    OracleTimeout,
    RpktError,
    StorageFailure,
    UnknownConcept,
)
from .graph import ConceptGraph, build_graph, render_dot
from .oracle import EducationLevel, FixtureOracle, Oracle, RemoteOracle
from .path import LearningPath, build_path, explanation_request, flatten_sequence, render_text
from .store import SessionStore

__version__ = "0.1.0"

__all__ = [
    "AssessmentOutcome",
    "CapReason",
    "Concept",
    "ConceptGraph",
    "ConflictingAssessment",
    "CorruptLog",
    "CycleDetected",
    "DEFAULT_MAX_DEPTH",
    "DepthExceeded",
    "EducationLevel",
    "EmptyLabel",
    "EmptyQuestion",
    "EventKind",
    "Expansion",
    "FixtureInvalid",
    "FixtureOracle",
    "InvalidSession",
    "KnowledgeStatus",
    "LearningPath",
    "MalformedResponse",
    "NotFound",
    "Occurrence",
    "Oracle",
    "OracleFailure",
    "OracleTimeout",
    "PendingAssessment",
    "Phase",
    "RemoteOracle",
    "RpktError",
    "Session",
    "SessionEvent",
    "SessionStore",
    "Status",
    "StorageFailure",
    "TraceNode",
    "TraceTree",
    "UnknownConcept",
    "build_graph",
    "build_path",
    "check_invariants",
    "explanation_request",
    "flatten_sequence",
    "is_complete",
    "normalize_label",
    "pending_assessments",
    "render_dot",
    "render_text",
    "replay",
    "session_from_snapshot",
    "snapshot",
    "start_session",
    "submit_assessment",
]
