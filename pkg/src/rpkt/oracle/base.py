"""Shared oracle contract: request context, result types, and response validation.

Every oracle implementation (fixture-backed or remote) funnels its raw output
through the validators here, so the engine only ever sees 0-4 distinct,
non-self, non-ancestor prerequisites and 1-6 distinct key concepts.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol, runtime_checkable

from ..concepts import Concept, display_label, normalize_label
from ..errors import EmptyLabel, MalformedResponse

logger = logging.getLogger(__name__)

MAX_KEY_CONCEPTS = 6
MAX_PREREQS = 4


class EducationLevel(str, Enum):
    MIDDLE_SCHOOL = "middle_school"
    HIGH_SCHOOL = "high_school"
    UNDERGRADUATE = "undergraduate"
    GRADUATE = "graduate"

    @classmethod
    def parse(cls, value: "EducationLevel | str") -> "EducationLevel":
        if isinstance(value, cls):
            return value
        return cls(str(value).strip().lower().replace(" ", "_").replace("-", "_"))


@dataclass
class QuestionAnalysis:
    """Question understanding, why it matters, and the level-1 concept list."""

    understanding: str
    importance: str
    key_concepts: list[Concept]


@dataclass
class Prerequisite:
    label: str
    rationale: str = ""


@dataclass
class ExtractionResult:
    """Validated prerequisite list for one concept, or a fundamentality verdict."""

    prerequisites: list[Prerequisite]
    fundamental: bool


@dataclass
class OracleRequestContext:
    """What the oracle may condition on when expanding one concept.

    ``ancestor_chain`` holds display labels from the root target down to the
    concept being expanded, inclusive.
    """

    question: str
    education_level: EducationLevel
    ancestor_chain: list[str] = field(default_factory=list)

    def ancestor_keys(self) -> list[str]:
        keys = []
        for label in self.ancestor_chain:
            try:
                keys.append(normalize_label(label))
            except EmptyLabel:
                continue
        return keys


@dataclass
class ExplanationRequest:
    """Inputs for the personalized explanation: what is known, what is missing.

    ``unknown_ordered`` must be prerequisite-first: every concept appears after
    the concepts it depends on.
    """

    question: str
    education_level: EducationLevel
    known: list[Concept]
    unknown_ordered: list[Concept]


@runtime_checkable
class Oracle(Protocol):
    """Pluggable source of analyses, prerequisites, and explanations."""

    def analyze_question(self, question: str, education_level: EducationLevel) -> QuestionAnalysis: ...

    def extract_prereqs(self, concept: Concept, ctx: OracleRequestContext) -> ExtractionResult: ...

    def generate_explanation(self, request: ExplanationRequest) -> str: ...

    def describe(self) -> dict: ...

    def healthy(self) -> bool: ...


def validate_key_concepts(labels: list, *, source: str) -> list[Concept]:
    """Deduplicate, drop empties, and clamp a raw key-concept list to 1-6 entries."""
    concepts: list[Concept] = []
    seen: set[str] = set()
    for item in labels:
        label = item.get("label") if isinstance(item, dict) else item
        if not isinstance(label, str):
            logger.warning("%s: dropping non-string key concept %r", source, item)
            continue
        try:
            concept = Concept.from_label(label)
        except EmptyLabel:
            logger.warning("%s: dropping empty key concept %r", source, label)
            continue
        if concept.key in seen:
            continue
        seen.add(concept.key)
        concepts.append(concept)
    if not concepts:
        raise MalformedResponse(f"{source}: analysis produced no usable key concepts")
    if len(concepts) > MAX_KEY_CONCEPTS:
        logger.warning(
            "%s: %d key concepts returned, truncating to %d",
            source, len(concepts), MAX_KEY_CONCEPTS,
        )
        concepts = concepts[:MAX_KEY_CONCEPTS]
    return concepts


def validate_extraction(
    raw_prereqs: list,
    fundamental: bool,
    *,
    concept_key: str,
    ancestor_keys: list[str],
    source: str,
) -> ExtractionResult:
    """Filter a raw prerequisite list down to the engine's contract.

    Self references and anything already on the ancestor chain are removed,
    duplicates dropped, then the list is clamped to 4.  An empty list with
    ``fundamental`` false is coerced to fundamental with a warning, so the
    engine never sees a concept that neither expands nor terminates.
    """
    if fundamental:
        return ExtractionResult(prerequisites=[], fundamental=True)

    blocked = set(ancestor_keys) | {concept_key}
    prereqs: list[Prerequisite] = []
    seen: set[str] = set()
    for item in raw_prereqs:
        if isinstance(item, dict):
            label, rationale = item.get("label"), item.get("rationale", "")
        else:
            label, rationale = item, ""
        if not isinstance(label, str):
            logger.warning("%s: dropping non-string prerequisite %r", source, item)
            continue
        try:
            key = normalize_label(label)
        except EmptyLabel:
            logger.warning("%s: dropping empty prerequisite %r", source, label)
            continue
        if key in blocked:
            logger.debug("%s: dropping self/ancestor prerequisite %r", source, label)
            continue
        if key in seen:
            continue
        seen.add(key)
        rationale = rationale if isinstance(rationale, str) else ""
        prereqs.append(Prerequisite(label=display_label(label), rationale=rationale))
    if not prereqs:
        logger.warning(
            "%s: %r yielded no usable prerequisites, treating it as fundamental",
            source, concept_key,
        )
        return ExtractionResult(prerequisites=[], fundamental=True)
    if len(prereqs) > MAX_PREREQS:
        logger.warning(
            "%s: %d prerequisites for %r, truncating to %d",
            source, len(prereqs), concept_key, MAX_PREREQS,
        )
        prereqs = prereqs[:MAX_PREREQS]
    return ExtractionResult(prerequisites=prereqs, fundamental=False)


class ExtractionCache:
    """Thread-safe memo for extraction results, keyed by question, level, and concept."""

    def __init__(self):
        self._lock = threading.Lock()
        self._entries: dict[tuple[str, str, str], ExtractionResult] = {}

    def get(self, question: str, level: EducationLevel, key: str) -> ExtractionResult | None:
        with self._lock:
            return self._entries.get((question, level.value, key))

    def put(self, question: str, level: EducationLevel, key: str, result: ExtractionResult) -> None:
        with self._lock:
            self._entries[(question, level.value, key)] = result
