"""Learning-path assembly: flatten the trace into a prerequisite-first sequence.

The sequence is a depth-first post-order walk of the merged concept graph (one
node per concept, edges from each expanded concept to its prerequisites in
extraction order).  Post-order guarantees every prerequisite is listed before
the concepts that need it; walking the merged graph rather than the raw
occurrence tree keeps the sequence independent of the order in which the
learner answered.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .concepts import Occurrence, Status
from .engine import Phase, Session
from .oracle.base import ExplanationRequest


def concept_adjacency(session: Session) -> dict[str, list[str]]:
    """Prerequisites of each concept, in extraction order, duplicates merged.

    Only primary occurrences own children, so each concept's list comes from
    exactly one expansion.  Includes the root (the question's own target)."""
    adjacency: dict[str, list[str]] = {}
    for node in sorted(session.tree.nodes.values(), key=lambda n: n.node_id):
        if node.occurrence is not Occurrence.PRIMARY:
            continue
        seen: set[str] = set()
        out: list[str] = []
        for child_id in node.children:
            child_key = session.tree.node(child_id).concept
            if child_key not in seen:
                seen.add(child_key)
                out.append(child_key)
        adjacency[node.concept] = out
    return adjacency


def learning_order(session: Session) -> list[str]:
    """Every surfaced concept in prerequisite-first order, root excluded.

    Iterative post-order with an on-stack guard, so pathological prerequisite
    graphs containing a concept-level cycle still terminate (the cycle is cut
    where it closes)."""
    root_key = session.tree.root.concept
    adjacency = concept_adjacency(session)
    order: list[str] = []
    done: set[str] = set()
    on_stack: set[str] = {root_key}
    stack: list[tuple[str, int]] = [(root_key, 0)]
    while stack:
        key, cursor = stack[-1]
        children = adjacency.get(key, [])
        descended = False
        while cursor < len(children):
            child = children[cursor]
            cursor += 1
            stack[-1] = (key, cursor)
            if child not in done and child not in on_stack:
                stack.append((child, 0))
                on_stack.add(child)
                descended = True
                break
        if descended:
            continue
        stack.pop()
        on_stack.discard(key)
        done.add(key)
        if key != root_key:
            order.append(key)
    return order


def flatten_sequence(session: Session) -> list[str]:
    """Keys of the concepts the learner must study, prerequisites first."""
    return [
        key
        for key in learning_order(session)
        if session.status.get(key) is Status.UNKNOWN
    ]


@dataclass
class PathStep:
    """One study step: a concept the learner marked unknown."""

    position: int
    key: str
    label: str
    depth: int
    fundamental: bool


@dataclass
class LearningPath:
    """Renderable study plan for one session."""

    question: str
    education_level: str
    complete: bool
    known: list[str] = field(default_factory=list)
    pending: list[str] = field(default_factory=list)
    steps: list[PathStep] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "question": self.question,
            "education_level": self.education_level,
            "complete": self.complete,
            "known": list(self.known),
            "pending": list(self.pending),
            "sequence": [step.key for step in self.steps],
            "steps": [
                {
                    "position": step.position,
                    "concept": step.key,
                    "label": step.label,
                    "depth": step.depth,
                    "fundamental": step.fundamental,
                }
                for step in self.steps
            ],
        }


def build_path(session: Session) -> LearningPath:
    """Assemble the study plan from the session's current state."""
    order = learning_order(session)
    path = LearningPath(
        question=session.question,
        education_level=session.education_level.value,
        complete=session.phase is Phase.COMPLETE,
    )
    position = 0
    for key in order:
        status = session.status.get(key)
        concept = session.concept(key)
        if status is Status.KNOWN:
            path.known.append(concept.label)
        elif status is Status.UNASSESSED:
            path.pending.append(concept.label)
        else:
            position += 1
            primary = session.tree.primary_node(key)
            path.steps.append(
                PathStep(
                    position=position,
                    key=key,
                    label=concept.label,
                    depth=primary.depth if primary else 0,
                    fundamental=concept.fundamental,
                )
            )
    return path


def render_text(path: LearningPath) -> str:
    """Plain-text study plan, stable for a given path."""
    lines = [f"Learning path: {path.question}"]
    lines.append(
        f"Level: {path.education_level} | "
        f"Status: {'complete' if path.complete else 'in progress'}"
    )
    lines.append("")
    if path.known:
        lines.append("Already known:")
        lines.extend(f"  - {label}" for label in path.known)
        lines.append("")
    if path.pending:
        lines.append("Awaiting assessment:")
        lines.extend(f"  ? {label}" for label in path.pending)
        lines.append("")
    if path.steps:
        lines.append("To learn, in order:")
        for step in path.steps:
            suffix = " (fundamental)" if step.fundamental else ""
            lines.append(f"  {step.position}. [L{step.depth}] {step.label}{suffix}")
    else:
        lines.append("Nothing to learn: every surfaced concept is already known.")
    lines.append("")
    lines.append(f"Target: {path.question}")
    return "\n".join(lines) + "\n"


def explanation_request(session: Session) -> ExplanationRequest:
    """Bundle what the explanation needs: known concepts and the study order."""
    known = []
    unknown = []
    for key in learning_order(session):
        status = session.status.get(key)
        if status is Status.KNOWN:
            known.append(session.concept(key))
        elif status is Status.UNKNOWN:
            unknown.append(session.concept(key))
    return ExplanationRequest(
        question=session.question,
        education_level=session.education_level,
        known=known,
        unknown_ordered=unknown,
    )
