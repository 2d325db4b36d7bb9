"""Exception types shared across the package."""

from __future__ import annotations


class RpktError(Exception):
    """Base class for all errors raised by this package."""


class EmptyLabel(RpktError):
    """A concept label normalized to the empty string."""


class EmptyQuestion(RpktError):
    """A session was started with an empty question."""


class CycleDetected(RpktError):
    """A child concept equals one of its ancestors in the trace tree."""


class DepthExceeded(RpktError):
    """A child was added below a node already at the maximum depth."""


class UnknownConcept(RpktError):
    """The concept has no surfaced primary node in the session."""


class ConflictingAssessment(RpktError):
    """An already-assessed concept was re-submitted with the opposite value without force."""


class CorruptLog(RpktError):
    """An event log has a gap, a malformed event, or disagrees with its snapshot."""


class OracleFailure(RpktError):
    """The prerequisite oracle could not produce a usable answer."""

    def __init__(self, message: str, *, retryable: bool = True):
        super().__init__(message)
        self.retryable = retryable


class OracleTimeout(OracleFailure):
    """The oracle did not answer within the configured timeout."""

    def __init__(self, message: str):
        super().__init__(message, retryable=True)


class AuthFailure(OracleFailure):
    """The remote endpoint rejected the configured credential."""

    def __init__(self, message: str):
        super().__init__(message, retryable=False)


class MalformedResponse(OracleFailure):
    """The oracle answered, but the payload never validated against the schema.

    ``raw_payloads`` holds every raw response seen across retries, for logging.
    """

    def __init__(self, message: str, raw_payloads: list[str] | None = None):
        super().__init__(message, retryable=False)
        self.raw_payloads = raw_payloads or []


class FixtureInvalid(RpktError):
    """A fixture file is missing, unparsable, or violates its own closure rules."""


class StorageFailure(RpktError):
    """A session document could not be written or read."""


class InvalidSession(StorageFailure):
    """A session violating its invariants was rejected before being written."""


class NotFound(RpktError):
    """No stored session exists under the requested id."""


class SchemaVersionUnsupported(StorageFailure):
    """A stored document's schema version has no migration path to the current one."""
