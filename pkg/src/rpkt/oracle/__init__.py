"""Prerequisite oracles: the shared interface, fixtures for tests, and the remote client."""

from .base import (
    MAX_KEY_CONCEPTS,
    MAX_PREREQS,
    EducationLevel,
    ExplanationRequest,
    ExtractionCache,
    ExtractionResult,
    Oracle,
    OracleRequestContext,
    Prerequisite,
    QuestionAnalysis,
    validate_extraction,
    validate_key_concepts,
)
from .fixture import FixtureOracle
from .remote import RemoteOracle

__all__ = [
    "MAX_KEY_CONCEPTS",
    "MAX_PREREQS",
    "EducationLevel",
    "ExplanationRequest",
    "ExtractionCache",
    "ExtractionResult",
    "FixtureOracle",
    "Oracle",
    "OracleRequestContext",
    "Prerequisite",
    "QuestionAnalysis",
    "RemoteOracle",
    "validate_extraction",
    "validate_key_concepts",
]
