"""Shared fixtures for the test suite."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from rpkt import start_session
from rpkt.engine import logical_clock
from rpkt.oracle import FixtureOracle

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURE_FILE = REPO_ROOT / "fixtures" / "backprop.json"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

DEMO_QUESTION = "How does backpropagation work in neural networks?"

DEMO_ANSWERS = {
    "forward propagation": True,
    "gradient descent": False,
    "loss functions": True,
    "chain rule": False,
    "derivative": False,
    "cost function": True,
    "function composition": False,
    "limits": False,
}


@pytest.fixture
def demo_oracle() -> FixtureOracle:
    return FixtureOracle.from_file(FIXTURE_FILE)


@pytest.fixture
def demo_session(demo_oracle):
    """The fully assessed demo scenario with deterministic ids and timestamps."""
    session = start_session(
        DEMO_QUESTION,
        "undergraduate",
        demo_oracle,
        session_id="demo",
        clock=logical_clock(),
    )
    from rpkt import is_complete, pending_assessments, submit_assessment

    while not is_complete(session):
        item = pending_assessments(session)[0]
        submit_assessment(
            session, item.concept.key, DEMO_ANSWERS[item.concept.key], demo_oracle
        )
    return session


def golden(name: str) -> str:
    return (GOLDEN_DIR / name).read_text(encoding="utf-8")


def golden_json(name: str) -> dict:
    return json.loads(golden(name))
