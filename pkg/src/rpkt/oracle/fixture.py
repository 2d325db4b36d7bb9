"""Deterministic fixture-backed oracle.

A fixture is a JSON document mapping question patterns to analyses and concept
keys to prerequisite lists.  Identical inputs always produce identical outputs,
which makes fixtures the test double for every scripted and golden scenario.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

from ..concepts import Concept, normalize_label
from ..errors import EmptyLabel, FixtureInvalid, OracleFailure
from .base import (
    EducationLevel,
    ExplanationRequest,
    ExtractionCache,
    ExtractionResult,
    OracleRequestContext,
    QuestionAnalysis,
    validate_extraction,
    validate_key_concepts,
)
from .prompts import build_explanation_prompt

logger = logging.getLogger(__name__)

FIXTURE_SCHEMA_VERSION = 1


class FixtureOracle:
    """Oracle answering from a closed or open fixture graph.

    In open mode (the default), a concept absent from the fixture is treated as
    fundamental, so sessions never dead-end on an incomplete fixture.  In
    closed mode the fixture must be closed under its own prerequisite lists.
    """

    def __init__(self, data: dict, *, source: str = "<dict>"):
        self.source = source
        self.open_mode = data.get("mode", "open") != "closed"
        self._analyses = self._parse_analyses(data.get("analyses", []))
        self._prereqs = self._parse_prereqs(data.get("prereqs", {}))
        self._fundamentals = {self._norm(k) for k in data.get("fundamentals", [])}
        self._explanations = data.get("explanations", [])
        self._cache = ExtractionCache()
        self.extract_calls = 0
        if not self.open_mode:
            self._check_closure()

    @classmethod
    def from_file(cls, path: str | Path) -> "FixtureOracle":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise FixtureInvalid(f"fixture file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise FixtureInvalid(f"fixture file is not valid JSON: {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise FixtureInvalid(f"fixture root must be an object: {path}")
        return cls(data, source=str(path))

    def _norm(self, label: str) -> str:
        try:
            return normalize_label(label)
        except EmptyLabel as exc:
            raise FixtureInvalid(f"{self.source}: empty concept label in fixture") from exc

    def _parse_analyses(self, raw: list) -> list[dict]:
        analyses = []
        for entry in raw:
            if "question_contains" not in entry or "key_concepts" not in entry:
                raise FixtureInvalid(
                    f"{self.source}: analysis entries need question_contains and key_concepts"
                )
            analyses.append(entry)
        return analyses

    def _parse_prereqs(self, raw: dict) -> dict[str, list[str]]:
        return {self._norm(key): list(labels) for key, labels in raw.items()}

    def _check_closure(self) -> None:
        for key, labels in self._prereqs.items():
            for label in labels:
                child = self._norm(label)
                if child not in self._prereqs and child not in self._fundamentals:
                    raise FixtureInvalid(
                        f"{self.source}: closed fixture lists {label!r} under {key!r} "
                        "but defines no entry for it"
                    )

    # Oracle interface

    def analyze_question(self, question: str, education_level: EducationLevel) -> QuestionAnalysis:
        q = question.lower()
        for entry in self._analyses:
            if entry["question_contains"].lower() in q:
                return QuestionAnalysis(
                    understanding=entry.get("understanding", ""),
                    importance=entry.get("importance", ""),
                    key_concepts=validate_key_concepts(
                        entry["key_concepts"], source=self.source
                    ),
                )
        raise OracleFailure(
            f"fixture {self.source} has no analysis matching question {question!r}",
            retryable=False,
        )

    def extract_prereqs(self, concept: Concept, ctx: OracleRequestContext) -> ExtractionResult:
        cached = self._cache.get(ctx.question, ctx.education_level, concept.key)
        if cached is not None:
            return cached
        self.extract_calls += 1
        if concept.key in self._fundamentals:
            result = ExtractionResult(prerequisites=[], fundamental=True)
        elif concept.key in self._prereqs:
            result = validate_extraction(
                self._prereqs[concept.key],
                fundamental=False,
                concept_key=concept.key,
                ancestor_keys=ctx.ancestor_keys(),
                source=self.source,
            )
        elif self.open_mode:
            logger.debug("%s: %r not in fixture, treating as fundamental", self.source, concept.key)
            result = ExtractionResult(prerequisites=[], fundamental=True)
        else:
            raise OracleFailure(
                f"closed fixture {self.source} has no entry for {concept.key!r}",
                retryable=False,
            )
        self._cache.put(ctx.question, ctx.education_level, concept.key, result)
        return result

    def generate_explanation(self, request: ExplanationRequest) -> str:
        unknown_keys = [c.key for c in request.unknown_ordered]
        q = request.question.lower()
        for entry in self._explanations:
            if entry.get("question_contains", "").lower() not in q:
                continue
            expected = [self._norm(label) for label in entry.get("unknown", [])]
            if expected == unknown_keys:
                return entry["text"]
        # No canned text: derive a deterministic explanation from the same
        # prompt assembly the remote oracle would use.
        prompt = build_explanation_prompt(request)
        return "[fixture explanation]\n" + prompt

    def describe(self) -> dict:
        return {"mode": "fixture", "source": self.source, "open": self.open_mode}

    def healthy(self) -> bool:
        return True
