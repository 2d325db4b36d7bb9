"""HTTP contract: status codes, persistence timing, concurrency, error mapping."""

from __future__ import annotations

import threading

import pytest
from fastapi.testclient import TestClient

from rpkt.api import create_app
from rpkt.config import ApiConfig, Config
from rpkt.errors import MalformedResponse, OracleFailure, OracleTimeout
from rpkt.oracle import FixtureOracle
from rpkt.store import SessionStore

from .conftest import DEMO_ANSWERS, DEMO_QUESTION, FIXTURE_FILE


@pytest.fixture
def store(tmp_path) -> SessionStore:
    return SessionStore(tmp_path / "sessions")


@pytest.fixture
def oracle() -> FixtureOracle:
    return FixtureOracle.from_file(FIXTURE_FILE)


@pytest.fixture
def client(oracle, store) -> TestClient:
    return TestClient(create_app(Config(), oracle=oracle, store=store))


def start_demo(client) -> str:
    response = client.post("/api/v1/sessions", json={"question": DEMO_QUESTION})
    assert response.status_code == 201
    return response.json()["session_id"]


def finish_demo(client, session_id) -> None:
    while True:
        pending = client.get(f"/api/v1/sessions/{session_id}").json()["pending"]
        if not pending:
            return
        concept = pending[0]["concept"]
        client.post(
            f"/api/v1/sessions/{session_id}/assessments",
            json={"concept_id": concept, "known": DEMO_ANSWERS[concept]},
        )


class TestSessionEndpoints:
    def test_create_returns_analysis_and_pending(self, client):
        response = client.post(
            "/api/v1/sessions", json={"question": DEMO_QUESTION, "education_level": "graduate"}
        )
        body = response.json()
        assert response.status_code == 201
        assert body["education_level"] == "graduate"
        assert [p["label"] for p in body["pending"]] == [
            "Forward Propagation", "Gradient Descent", "Loss Functions", "Chain Rule",
        ]
        assert body["analysis"]["key_concepts"][0]["key"] == "forward propagation"
        assert body["phase"] == "assessing"
        # the occurrence tree and concept registry ride along for UI rendering
        root = body["tree"]["nodes"][0]
        assert root["depth"] == 0 and len(root["children"]) == 4
        assert body["concepts"]["gradient descent"]["label"] == "Gradient Descent"

    def test_create_persists_before_responding(self, oracle, store):
        app = create_app(Config(), oracle=oracle, store=store)
        client = TestClient(app)
        sid = start_demo(client)
        # a brand-new app over the same directory sees the session: the state
        # acknowledged by the 201 survived the "crash"
        fresh = TestClient(create_app(Config(), oracle=oracle, store=store))
        response = fresh.get(f"/api/v1/sessions/{sid}")
        assert response.status_code == 200
        assert response.json()["question"] == DEMO_QUESTION

    def test_assessment_persists_before_responding(self, oracle, store, client):
        sid = start_demo(client)
        client.post(
            f"/api/v1/sessions/{sid}/assessments",
            json={"concept_id": "gradient descent", "known": False},
        )
        fresh = TestClient(create_app(Config(), oracle=oracle, store=store))
        body = fresh.get(f"/api/v1/sessions/{sid}").json()
        assert body["status"]["gradient descent"] == "unknown"
        assert {p["concept"] for p in body["pending"]} >= {"derivative", "cost function"}

    def test_get_missing_session_is_404(self, client):
        assert client.get("/api/v1/sessions/absent").status_code == 404

    def test_validation_errors_are_422(self, client):
        assert client.post("/api/v1/sessions", json={}).status_code == 422
        assert client.post("/api/v1/sessions", json={"question": ""}).status_code == 422
        assert client.post("/api/v1/sessions", json={"question": "   "}).status_code == 422
        assert (
            client.post("/api/v1/sessions", json={"question": "q?", "max_depth": 99}).status_code
            == 422
        )
        assert (
            client.post(
                "/api/v1/sessions", json={"question": "q?", "education_level": "toddler"}
            ).status_code
            == 422
        )

    def test_listing_and_delete(self, client):
        sid = start_demo(client)
        listing = client.get("/api/v1/sessions").json()["sessions"]
        assert [row["session_id"] for row in listing] == [sid]
        assert client.delete(f"/api/v1/sessions/{sid}").status_code == 204
        assert client.get("/api/v1/sessions").json()["sessions"] == []
        assert client.delete(f"/api/v1/sessions/{sid}").status_code == 404


class TestAssessmentEndpoint:
    def test_assessment_reports_outcome(self, client):
        sid = start_demo(client)
        body = client.post(
            f"/api/v1/sessions/{sid}/assessments",
            json={"concept_id": "gradient descent", "known": False},
        ).json()
        assert [n["key"] for n in body["outcome"]["new_concepts"]] == [
            "derivative", "cost function",
        ]
        assert body["phase"] == "assessing"
        assert {p["concept"] for p in body["pending"]} >= {"derivative", "cost function"}
        assert body["session"]["status"]["gradient descent"] == "unknown"

    def test_unsurfaced_concept_is_404(self, client):
        sid = start_demo(client)
        response = client.post(
            f"/api/v1/sessions/{sid}/assessments", json={"concept_id": "zeppelins", "known": True}
        )
        assert response.status_code == 404

    def test_conflicting_assessment_is_409_until_forced(self, client):
        sid = start_demo(client)
        client.post(
            f"/api/v1/sessions/{sid}/assessments",
            json={"concept_id": "gradient descent", "known": False},
        )
        conflict = client.post(
            f"/api/v1/sessions/{sid}/assessments",
            json={"concept_id": "gradient descent", "known": True},
        )
        assert conflict.status_code == 409
        forced = client.post(
            f"/api/v1/sessions/{sid}/assessments",
            json={"concept_id": "gradient descent", "known": True, "force": True},
        )
        assert forced.status_code == 200
        assert forced.json()["session"]["status"]["gradient descent"] == "known"

    def test_completion_is_reported(self, client):
        sid = start_demo(client)
        finish_demo(client, sid)
        body = client.get(f"/api/v1/sessions/{sid}").json()
        assert body["phase"] == "complete"
        assert body["sequence"] == [
            "limits", "derivative", "gradient descent", "function composition", "chain rule",
        ]

    def test_concurrent_assessments_on_one_session_stay_consistent(self, oracle, store):
        client = TestClient(create_app(Config(), oracle=oracle, store=store))
        sid = start_demo(client)
        concepts = ["forward propagation", "gradient descent", "loss functions", "chain rule"]
        errors = []

        def submit(concept):
            try:
                response = client.post(
                    f"/api/v1/sessions/{sid}/assessments",
                    json={"concept_id": concept, "known": DEMO_ANSWERS[concept]},
                )
                assert response.status_code == 200
            except Exception as exc:
                errors.append(exc)

        threads = [threading.Thread(target=submit, args=(c,)) for c in concepts]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        body = client.get(f"/api/v1/sessions/{sid}").json()
        assert body["status"]["gradient descent"] == "unknown"
        assert body["status"]["forward propagation"] == "known"
        assert {p["concept"] for p in body["pending"]} == {
            "derivative", "cost function", "function composition",
        }


class TestOracleErrorMapping:
    class BrokenOracle:
        def __init__(self, error):
            self.error = error

        def analyze_question(self, question, level):
            raise self.error

        def extract_prereqs(self, concept, ctx):
            raise self.error

        def generate_explanation(self, request):
            raise self.error

        def describe(self):
            return {"mode": "broken"}

        def healthy(self):
            return False

    def test_retryable_failure_is_502_with_flag(self, store):
        client = TestClient(
            create_app(Config(), oracle=self.BrokenOracle(OracleFailure("down")), store=store)
        )
        response = client.post("/api/v1/sessions", json={"question": DEMO_QUESTION})
        assert response.status_code == 502
        assert response.json()["detail"]["retryable"] is True

    def test_malformed_response_is_502_not_retryable(self, store):
        client = TestClient(
            create_app(
                Config(), oracle=self.BrokenOracle(MalformedResponse("junk")), store=store
            )
        )
        response = client.post("/api/v1/sessions", json={"question": DEMO_QUESTION})
        assert response.status_code == 502
        assert response.json()["detail"]["retryable"] is False

    def test_timeout_is_504(self, store):
        client = TestClient(
            create_app(Config(), oracle=self.BrokenOracle(OracleTimeout("slow")), store=store)
        )
        assert (
            client.post("/api/v1/sessions", json={"question": DEMO_QUESTION}).status_code == 504
        )

    def test_failed_expansion_persists_the_assessment(self, oracle, store):
        client = TestClient(create_app(Config(), oracle=oracle, store=store))
        sid = start_demo(client)

        broken = create_app(
            Config(), oracle=self.BrokenOracle(OracleFailure("down")), store=store
        )
        response = TestClient(broken).post(
            f"/api/v1/sessions/{sid}/assessments",
            json={"concept_id": "gradient descent", "known": False},
        )
        assert response.status_code == 502
        # the answer was recorded even though expansion failed
        body = client.get(f"/api/v1/sessions/{sid}").json()
        assert body["status"]["gradient descent"] == "unknown"
        # retrying the same answer with a healthy oracle completes the expansion
        retry = client.post(
            f"/api/v1/sessions/{sid}/assessments",
            json={"concept_id": "gradient descent", "known": False},
        )
        assert retry.status_code == 200
        assert {p["concept"] for p in retry.json()["session"]["pending"]} >= {
            "derivative", "cost function",
        }


class TestPathGraphExplanation:
    def test_path_json_and_text(self, client):
        sid = start_demo(client)
        finish_demo(client, sid)
        body = client.get(f"/api/v1/sessions/{sid}/path").json()
        assert body["sequence"][0] == "limits"
        text = client.get(f"/api/v1/sessions/{sid}/path", params={"format": "text"})
        assert text.headers["content-type"].startswith("text/plain")
        assert "To learn, in order:" in text.text

    def test_path_txt_route(self, client):
        sid = start_demo(client)
        finish_demo(client, sid)
        response = client.get(f"/api/v1/sessions/{sid}/path.txt")
        assert response.headers["content-type"].startswith("text/plain")
        assert "1. [L3] Limits" in response.text

    def test_graph_json_and_dot(self, client):
        sid = start_demo(client)
        finish_demo(client, sid)
        body = client.get(f"/api/v1/sessions/{sid}/graph").json()
        assert {n["key"] for n in body["nodes"]} >= {"limits", "derivative"}
        dot = client.get(f"/api/v1/sessions/{sid}/graph", params={"format": "dot"})
        assert dot.text.startswith("digraph prerequisites {")

    def test_unknown_format_is_422(self, client):
        sid = start_demo(client)
        assert (
            client.get(f"/api/v1/sessions/{sid}/path", params={"format": "pdf"}).status_code == 422
        )

    def test_explanation_requires_an_assessment(self, client):
        sid = start_demo(client)
        assert client.post(f"/api/v1/sessions/{sid}/explanation").status_code == 409

    def test_explanation_caches_until_state_changes(self, client):
        sid = start_demo(client)
        finish_demo(client, sid)
        first = client.post(f"/api/v1/sessions/{sid}/explanation").json()
        second = client.post(f"/api/v1/sessions/{sid}/explanation").json()
        assert first["cached"] is False and second["cached"] is True
        assert first["explanation"] == second["explanation"]
        client.post(
            f"/api/v1/sessions/{sid}/assessments",
            json={"concept_id": "gradient descent", "known": True, "force": True},
        )
        third = client.post(f"/api/v1/sessions/{sid}/explanation").json()
        assert third["cached"] is False
        assert third["explanation"] != first["explanation"]


class TestServiceWiring:
    def test_health_reports_oracle(self, client):
        body = client.get("/healthz").json()
        assert body["status"] == "ok"
        assert body["oracle_mode"] == "fixture"
        assert body["oracle"]["mode"] == "fixture"
        assert body["oracle_healthy"] is True

    def test_health_degrades_when_oracle_is_down(self, store):
        class Unreachable:
            def analyze_question(self, *a):
                raise AssertionError("not called")

            def extract_prereqs(self, *a):
                raise AssertionError("not called")

            def generate_explanation(self, *a):
                raise AssertionError("not called")

            def describe(self):
                return {"mode": "remote", "base_url": "https://down.example"}

            def healthy(self):
                return False

        client = TestClient(create_app(Config(), oracle=Unreachable(), store=store))
        body = client.get("/healthz").json()
        assert body["status"] == "degraded"
        assert body["oracle_mode"] == "remote"

    def test_cors_origins_come_from_config(self, oracle, store):
        config = Config(api=ApiConfig(cors_origins=["https://study.example"]))
        client = TestClient(create_app(config, oracle=oracle, store=store))
        response = client.options(
            "/api/v1/sessions",
            headers={
                "Origin": "https://study.example",
                "Access-Control-Request-Method": "POST",
            },
        )
        assert response.headers["access-control-allow-origin"] == "https://study.example"
        denied = client.options(
            "/api/v1/sessions",
            headers={
                "Origin": "https://evil.example",
                "Access-Control-Request-Method": "POST",
            },
        )
        assert "access-control-allow-origin" not in denied.headers
