"""Learning-path ordering, rendering, and explanation assembly."""

from __future__ import annotations

import json

from rpkt import start_session, submit_assessment
from rpkt.oracle import FixtureOracle
from rpkt.path import (
    build_path,
    concept_adjacency,
    explanation_request,
    flatten_sequence,
    learning_order,
    render_text,
)

from .conftest import golden, golden_json


class TestLearningOrder:
    def test_demo_order_is_prerequisite_first(self, demo_session):
        assert learning_order(demo_session) == [
            "forward propagation",
            "limits",
            "derivative",
            "cost function",
            "gradient descent",
            "loss functions",
            "function composition",
            "chain rule",
        ]

    def test_flatten_keeps_only_unknown_concepts(self, demo_session):
        assert flatten_sequence(demo_session) == [
            "limits",
            "derivative",
            "gradient descent",
            "function composition",
            "chain rule",
        ]

    def test_every_prerequisite_precedes_its_dependent(self, demo_session):
        sequence = flatten_sequence(demo_session)
        position = {key: i for i, key in enumerate(sequence)}
        for concept, prereqs in concept_adjacency(demo_session).items():
            if concept not in position:
                continue
            for prereq in prereqs:
                if prereq in position:
                    assert position[prereq] < position[concept]

    def test_duplicates_collapse_to_one_entry(self, demo_session):
        sequence = flatten_sequence(demo_session)
        assert sequence.count("derivative") == 1

    def test_adjacency_comes_from_primary_children_in_extraction_order(self, demo_session):
        adjacency = concept_adjacency(demo_session)
        assert adjacency["gradient descent"] == ["derivative", "cost function"]
        assert adjacency["chain rule"] == ["derivative", "function composition"]
        assert adjacency["derivative"] == ["limits"]

    def test_incomplete_sessions_flatten_what_is_assessed(self, demo_oracle):
        session = start_session(
            "How does backpropagation work in neural networks?", "undergraduate", demo_oracle
        )
        submit_assessment(session, "gradient descent", False, demo_oracle)
        assert flatten_sequence(session) == ["gradient descent"]
        path = build_path(session)
        assert "Derivative" in path.pending and "Cost Function" in path.pending


class TestRendering:
    def test_path_dict_matches_golden(self, demo_session):
        assert build_path(demo_session).as_dict() == golden_json("path.json")

    def test_path_text_matches_golden(self, demo_session):
        assert render_text(build_path(demo_session)) == golden("path.txt")

    def test_known_concepts_are_listed_in_learning_order(self, demo_session):
        path = build_path(demo_session)
        assert path.known == ["Forward Propagation", "Cost Function", "Loss Functions"]

    def test_steps_number_sequentially_with_depth_tags(self, demo_session):
        path = build_path(demo_session)
        assert [s.position for s in path.steps] == [1, 2, 3, 4, 5]
        text = render_text(path)
        assert "1. [L3] Limits" in text
        assert "5. [L1] Chain Rule" in text

    def test_all_known_renders_a_nothing_to_learn_path(self):
        oracle = FixtureOracle(
            {"analyses": [{"question_contains": "q", "key_concepts": ["A", "B"]}]}
        )
        session = start_session("q?", "undergraduate", oracle)
        submit_assessment(session, "a", True, oracle)
        submit_assessment(session, "b", True, oracle)
        path = build_path(session)
        assert path.steps == [] and path.complete
        assert "Nothing to learn" in render_text(path)

    def test_json_export_is_deterministic(self, demo_session):
        one = json.dumps(build_path(demo_session).as_dict(), sort_keys=True)
        two = json.dumps(build_path(demo_session).as_dict(), sort_keys=True)
        assert one == two


class TestExplanationRequest:
    def test_collects_known_and_ordered_unknown(self, demo_session):
        request = explanation_request(demo_session)
        assert [c.label for c in request.known] == [
            "Forward Propagation", "Cost Function", "Loss Functions",
        ]
        assert [c.label for c in request.unknown_ordered] == [
            "Limits", "Derivative", "Gradient Descent", "Function Composition", "Chain Rule",
        ]
        assert request.question == demo_session.question

    def test_unassessed_concepts_are_excluded(self, demo_oracle):
        session = start_session(
            "How does backpropagation work in neural networks?", "undergraduate", demo_oracle
        )
        submit_assessment(session, "gradient descent", False, demo_oracle)
        request = explanation_request(session)
        assert [c.label for c in request.unknown_ordered] == ["Gradient Descent"]
        assert request.known == []
