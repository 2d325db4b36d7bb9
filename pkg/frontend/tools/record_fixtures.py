"""Record real API payloads for the component tests.

Drives the backend through the demo scenario over its HTTP interface and
freezes every response the UI consumes.  Rerun after any API change:

    python3 tools/record_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi.testclient import TestClient

from rpkt.api import create_app
from rpkt.config import Config
from rpkt.oracle import FixtureOracle
from rpkt.store import SessionStore

HERE = Path(__file__).resolve().parent
REPO = HERE.parent.parent
OUT = HERE.parent / "tests" / "fixtures"

QUESTION = "How does backpropagation work in neural networks?"
ANSWERS = [
    ("forward propagation", True),
    ("gradient descent", False),
    ("loss functions", True),
    ("chain rule", False),
    ("cost function", True),
    ("derivative", False),
    ("function composition", False),
    ("limits", False),
]


def dump(name: str, payload) -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / name).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {name}")


def main() -> None:
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        oracle = FixtureOracle.from_file(REPO / "fixtures" / "backprop.json")
        client = TestClient(create_app(Config(), oracle=oracle, store=SessionStore(tmp)))

        dump("healthz.json", client.get("/healthz").json())

        created = client.post("/api/v1/sessions", json={"question": QUESTION})
        assert created.status_code == 201, created.text
        sid = created.json()["session_id"]
        dump("session_fresh.json", created.json())
        dump("graph_fresh.json", client.get(f"/api/v1/sessions/{sid}/graph").json())
        dump("path_fresh.json", client.get(f"/api/v1/sessions/{sid}/path").json())

        for i, (concept, known) in enumerate(ANSWERS):
            response = client.post(
                f"/api/v1/sessions/{sid}/assessments",
                json={"concept_id": concept, "known": known},
            )
            assert response.status_code == 200, response.text
            slug = concept.replace(" ", "_")
            dump(f"assess_{i}_{slug}.json", response.json())
            if i == 2:
                dump("session_mid.json", client.get(f"/api/v1/sessions/{sid}").json())
                dump("path_mid.json", client.get(f"/api/v1/sessions/{sid}/path").json())
                dump("graph_mid.json", client.get(f"/api/v1/sessions/{sid}/graph").json())

        dump("session_complete.json", client.get(f"/api/v1/sessions/{sid}").json())
        dump("path_complete.json", client.get(f"/api/v1/sessions/{sid}/path").json())
        dump("graph_complete.json", client.get(f"/api/v1/sessions/{sid}/graph").json())
        dump("explanation.json", client.post(f"/api/v1/sessions/{sid}/explanation").json())


if __name__ == "__main__":
    main()
