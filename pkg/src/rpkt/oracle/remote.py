"""Language-model oracle speaking the OpenAI chat-completions wire format.

Network and parsing faults map onto the oracle error types: auth problems are
terminal, rate limits and server errors are retried with backoff a bounded
number of times, and unparseable completions get a bounded number of repair
round-trips before :class:`MalformedResponse` surfaces with the raw payloads.
"""

from __future__ import annotations

import json
import logging
import os
import time
from typing import Callable

import httpx

from ..errors import AuthFailure, MalformedResponse, OracleFailure, OracleTimeout
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
from .prompts import (
    build_analysis_prompt,
    build_explanation_prompt,
    build_extraction_prompt,
)

logger = logging.getLogger(__name__)

API_KEY_ENV = "RPKT_API_KEY"
DEFAULT_TIMEOUT = 30.0
MAX_PARSE_RETRIES = 2
MAX_HTTP_ATTEMPTS = 3

_REPAIR_INSTRUCTION = (
    "Your previous reply could not be parsed: {problem}. "
    "Reply again with exactly one JSON object in the required shape and nothing else."
)


def _first_json_object(text: str) -> dict:
    """Extract the first JSON object embedded in a completion.

    Tolerates code fences and surrounding prose; raises
    :class:`MalformedResponse` when no parseable object is present.
    """
    if not isinstance(text, str):
        raise MalformedResponse(
            f"completion content is {type(text).__name__}, not text", raw_payloads=[repr(text)]
        )
    start = text.find("{")
    while start != -1:
        depth = 0
        in_string = False
        escaped = False
        for i in range(start, len(text)):
            ch = text[i]
            if in_string:
                if escaped:
                    escaped = False
                elif ch == "\\":
                    escaped = True
                elif ch == '"':
                    in_string = False
                continue
            if ch == '"':
                in_string = True
            elif ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
                if depth == 0:
                    try:
                        parsed = json.loads(text[start : i + 1])
                    except json.JSONDecodeError:
                        break
                    if isinstance(parsed, dict):
                        return parsed
                    break
        start = text.find("{", start + 1)
    raise MalformedResponse("no JSON object found in completion", raw_payloads=[text])


def _require(obj: dict, key: str, kind: type, raw: str):
    value = obj.get(key)
    if not isinstance(value, kind):
        raise MalformedResponse(
            f"field {key!r} must be {kind.__name__}, got {type(value).__name__}",
            raw_payloads=[raw],
        )
    return value


def _string_items(value: list, field_name: str, raw: str) -> list[str]:
    items: list[str] = []
    for entry in value:
        if isinstance(entry, str):
            items.append(entry)
        elif isinstance(entry, dict) and isinstance(entry.get("label"), str):
            items.append(entry["label"])
        else:
            raise MalformedResponse(
                f"entries of {field_name!r} must be strings", raw_payloads=[raw]
            )
    return items


class RemoteOracle:
    """Oracle backed by a chat-completions endpoint.

    ``transport`` is injectable so tests can stub the wire with
    ``httpx.MockTransport``; ``sleeper`` is injectable to skip real backoff
    waits.  Completions are requested at temperature 0.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str | None = None,
        timeout: float = DEFAULT_TIMEOUT,
        transport: httpx.BaseTransport | None = None,
        sleeper: Callable[[float], None] = time.sleep,
    ):
        key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        if not key:
            raise AuthFailure(
                f"no API key: pass api_key or set the {API_KEY_ENV} environment variable"
            )
        self.base_url = base_url.rstrip("/")
        self.model = model
        self._sleeper = sleeper
        self._cache = ExtractionCache()
        self._client = httpx.Client(
            base_url=self.base_url,
            timeout=timeout,
            headers={"Authorization": f"Bearer {key}"},
            transport=transport,
        )

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "RemoteOracle":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    # Wire helpers

    def _post_chat(self, messages: list[dict]) -> str:
        """POST one completion request, with bounded backoff on 429 and 5xx."""
        body = {"model": self.model, "temperature": 0, "messages": messages}
        last_error: OracleFailure | None = None
        for attempt in range(MAX_HTTP_ATTEMPTS):
            if attempt:
                self._sleeper(self._backoff_delay(attempt, last_error))
            try:
                response = self._client.post("/chat/completions", json=body)
            except httpx.TimeoutException as exc:
                raise OracleTimeout(f"oracle request timed out: {exc}") from exc
            except httpx.HTTPError as exc:
                raise OracleFailure(f"oracle request failed: {exc}") from exc

            if response.status_code in (401, 403):
                raise AuthFailure(f"oracle rejected credentials (HTTP {response.status_code})")
            if response.status_code == 429 or response.status_code >= 500:
                last_error = OracleFailure(
                    f"oracle returned HTTP {response.status_code}"
                )
                last_error.retry_after = _retry_after(response)
                logger.warning(
                    "oracle HTTP %s (attempt %d/%d)",
                    response.status_code, attempt + 1, MAX_HTTP_ATTEMPTS,
                )
                continue
            if response.status_code != 200:
                raise OracleFailure(
                    f"oracle returned HTTP {response.status_code}", retryable=False
                )
            return self._completion_text(response)
        raise last_error

    def _backoff_delay(self, attempt: int, last_error: OracleFailure | None) -> float:
        hinted = getattr(last_error, "retry_after", None)
        if hinted is not None:
            return hinted
        return 0.5 * (2 ** (attempt - 1))

    @staticmethod
    def _completion_text(response: httpx.Response) -> str:
        try:
            payload = response.json()
            return payload["choices"][0]["message"]["content"]
        except (json.JSONDecodeError, KeyError, IndexError, TypeError) as exc:
            raise MalformedResponse(
                f"completion envelope is malformed: {exc}", raw_payloads=[response.text]
            ) from exc

    def _ask_json(self, prompt: str, parse: Callable[[str], object]) -> object:
        """Request a completion and parse it, repairing malformed replies.

        After :data:`MAX_PARSE_RETRIES` repair round-trips the final
        :class:`MalformedResponse` carries every raw completion received.
        """
        messages = [{"role": "user", "content": prompt}]
        raw_payloads: list[str] = []
        for round_no in range(1 + MAX_PARSE_RETRIES):
            text = self._post_chat(messages)
            raw_payloads.append(text)
            try:
                return parse(text)
            except MalformedResponse as exc:
                logger.warning("unparseable oracle reply (round %d): %s", round_no + 1, exc)
                if round_no == MAX_PARSE_RETRIES:
                    raise MalformedResponse(
                        f"oracle reply stayed malformed after {MAX_PARSE_RETRIES} repairs: {exc}",
                        raw_payloads=raw_payloads,
                    ) from exc
                messages = messages + [
                    {"role": "assistant", "content": text},
                    {"role": "user", "content": _REPAIR_INSTRUCTION.format(problem=exc)},
                ]
        raise AssertionError("unreachable")

    # Oracle interface

    def analyze_question(self, question: str, level: EducationLevel) -> QuestionAnalysis:
        prompt = build_analysis_prompt(question, level)

        def parse(text: str) -> QuestionAnalysis:
            obj = _first_json_object(text)
            understanding = _require(obj, "understanding", str, text)
            importance = _require(obj, "importance", str, text)
            labels = _string_items(_require(obj, "key_concepts", list, text), "key_concepts", text)
            concepts = validate_key_concepts(labels, source="remote oracle")
            return QuestionAnalysis(
                understanding=understanding, importance=importance, key_concepts=concepts
            )

        return self._ask_json(prompt, parse)

    def extract_prereqs(self, concept, context: OracleRequestContext) -> ExtractionResult:
        cached = self._cache.get(context.question, context.education_level, concept.key)
        if cached is not None:
            return cached
        prompt = build_extraction_prompt(concept.label, context)

        def parse(text: str) -> ExtractionResult:
            obj = _first_json_object(text)
            fundamental = _require(obj, "fundamental", bool, text)
            raw_list = obj.get("prerequisites", [])
            if not isinstance(raw_list, list):
                raise MalformedResponse(
                    "field 'prerequisites' must be a list", raw_payloads=[text]
                )
            for entry in raw_list:
                if isinstance(entry, str):
                    continue
                if isinstance(entry, dict) and isinstance(entry.get("label"), str):
                    continue
                raise MalformedResponse(
                    "prerequisite entries must be strings or objects with a label",
                    raw_payloads=[text],
                )
            return validate_extraction(
                raw_list,
                fundamental,
                concept_key=concept.key,
                ancestor_keys=context.ancestor_keys(),
                source="remote oracle",
            )

        result = self._ask_json(prompt, parse)
        self._cache.put(context.question, context.education_level, concept.key, result)
        return result

    def generate_explanation(self, request: ExplanationRequest) -> str:
        prompt = build_explanation_prompt(request)
        text = self._post_chat([{"role": "user", "content": prompt}])
        if not text or not text.strip():
            raise MalformedResponse("oracle returned an empty explanation", raw_payloads=[text])
        return text.strip()

    def describe(self) -> dict:
        return {"mode": "remote", "base_url": self.base_url, "model": self.model}

    def healthy(self) -> bool:
        try:
            response = self._client.get("/models")
        except httpx.HTTPError:
            return False
        return response.status_code == 200


def _retry_after(response: httpx.Response) -> float | None:
    value = response.headers.get("Retry-After")
    if value is None:
        return None
    try:
        return max(0.0, float(value))
    except ValueError:
        return None
