"""Shared test utilities: deterministic fixture generators and session drivers."""

from __future__ import annotations

import random
import zlib

from rpkt import is_complete, pending_assessments, submit_assessment
from rpkt.engine import Session
from rpkt.oracle import FixtureOracle, Oracle


def make_question(seed: int) -> str:
    return f"What explains topic {seed}?"


def layered_fixture(
    seed: int,
    n_concepts: int = 12,
    n_keys: int = 3,
    max_prereqs: int = 3,
    fundamental_frac: float = 0.25,
) -> dict:
    """Closed, acyclic fixture: prerequisites point at strictly later labels."""
    rng = random.Random(seed)
    labels = [f"Concept {seed:04d}-{i:02d}" for i in range(n_concepts)]
    prereqs: dict[str, list[str]] = {}
    fundamentals: list[str] = []
    for i, label in enumerate(labels):
        later = labels[i + 1 :]
        if not later or rng.random() < fundamental_frac:
            fundamentals.append(label)
            continue
        count = rng.randint(1, min(max_prereqs, len(later)))
        prereqs[label] = rng.sample(later, count)
    return {
        "mode": "closed",
        "analyses": [
            {
                "question_contains": "topic",
                "understanding": f"A synthetic question about topic {seed}.",
                "importance": "It exercises the tracer.",
                "key_concepts": labels[:n_keys],
            }
        ],
        "prereqs": prereqs,
        "fundamentals": fundamentals,
    }


def random_graph_fixture(
    seed: int,
    max_concepts: int = 50,
    max_branching: int = 4,
    cycle_p: float = 0.3,
) -> dict:
    """Closed fixture over a random graph; back edges injected with cycle_p."""
    rng = random.Random(seed)
    n = rng.randint(5, max_concepts)
    labels = [f"Topic {seed:04d}-{i:02d}" for i in range(n)]
    prereqs: dict[str, list[str]] = {}
    fundamentals: list[str] = []
    for i, label in enumerate(labels):
        later = labels[i + 1 :]
        if not later or rng.random() < 0.15:
            fundamentals.append(label)
            continue
        count = rng.randint(1, min(max_branching, len(later)))
        prereqs[label] = rng.sample(later, count)
    if rng.random() < cycle_p:
        for _ in range(rng.randint(1, 3)):
            j = rng.randrange(1, n)
            target = labels[rng.randrange(0, j)] if rng.random() < 0.8 else labels[j]
            prereqs.setdefault(labels[j], []).append(target)
    return {
        "mode": "closed",
        "analyses": [
            {
                "question_contains": "topic",
                "understanding": f"A synthetic question about topic {seed}.",
                "importance": "It exercises termination.",
                "key_concepts": rng.sample(labels, min(len(labels), rng.randint(2, 4))),
            }
        ],
        "prereqs": prereqs,
        "fundamentals": fundamentals,
    }


def adversarial_fixture(seed: int) -> dict:
    """Open-mode fixture with cycles, self references, noise, and oversized lists."""
    rng = random.Random(seed)
    n = rng.randint(4, 20)
    labels = [f"Node {seed:04d}-{i:02d}" for i in range(n)]
    prereqs: dict[str, list[str]] = {}
    for i, label in enumerate(labels):
        wanted = rng.randint(0, 6)
        if wanted == 0:
            continue
        pool = labels + [
            label,
            label.upper(),
            f"  {label}  ",
            "Überkonzept",
            "!!!",
            f"Missing {seed}-{rng.randint(0, 5)}",
        ]
        chosen = [rng.choice(pool) for _ in range(wanted)]
        if rng.random() < 0.4 and i > 0:
            chosen.append(labels[rng.randint(0, i - 1)])
        prereqs[label] = chosen
    analyses_concepts = rng.sample(labels, min(len(labels), rng.randint(1, 8)))
    if rng.random() < 0.3:
        analyses_concepts = analyses_concepts + analyses_concepts[:2]
    return {
        "mode": "open",
        "analyses": [
            {
                "question_contains": "topic",
                "key_concepts": analyses_concepts,
            }
        ],
        "prereqs": prereqs,
        "fundamentals": rng.sample(labels, min(len(labels), 2)),
    }


def answer_fn(salt: str, unknown_pct: int = 60):
    """Deterministic know / don't-know answers keyed by concept."""

    def answer(key: str) -> bool:
        digest = zlib.crc32(f"{salt}:{key}".encode("utf-8"))
        return digest % 100 >= unknown_pct

    return answer


def drive(
    session: Session,
    oracle: Oracle,
    answer,
    pick=None,
    max_rounds: int = 100_000,
) -> int:
    """Answer pending assessments until the session completes; returns rounds."""
    rounds = 0
    while not is_complete(session):
        rounds += 1
        assert rounds <= max_rounds, "session did not terminate"
        items = pending_assessments(session)
        item = items[0] if pick is None else pick(items)
        submit_assessment(session, item.concept.key, answer(item.concept.key), oracle)
    return rounds


def pick_first(items):
    return items[0]


def pick_last(items):
    return items[-1]


def pick_alpha(items):
    return min(items, key=lambda i: i.concept.key)


def pick_reverse_alpha(items):
    return max(items, key=lambda i: i.concept.key)


def pick_seeded(seed: int):
    rng = random.Random(seed)

    def pick(items):
        return items[rng.randrange(len(items))]

    return pick


ORDER_STRATEGIES = {
    "first": lambda seed: pick_first,
    "last": lambda seed: pick_last,
    "alpha": lambda seed: pick_alpha,
    "reverse_alpha": lambda seed: pick_reverse_alpha,
    "seeded": pick_seeded,
}


def run_session(fixture: dict, seed: int, pick=None, salt: str = "a") -> Session:
    """Start and fully drive one session against a fixture dict."""
    from rpkt import start_session

    oracle = FixtureOracle(fixture, source=f"<seed {seed}>")
    session = start_session(make_question(seed), "undergraduate", oracle)
    drive(session, oracle, answer_fn(salt), pick=pick)
    return session
