"""Event-driven trace engine: session lifecycle, assessments, bounded expansion.

A session starts from one question, surfaces its key concepts, and grows an
occurrence tree as the learner marks concepts unknown.  Expansion stops at the
depth bound, at concepts the oracle calls fundamental, and at concepts already
marked known.  Every state change is appended to an event log from which the
full session state can be rebuilt without consulting the oracle.

The final concept DAG (merged occurrences), status map, and learning sequence
do not depend on the order in which the learner answers: if a concept
re-surfaces at a shallower depth than its current primary occurrence, the
shallower occurrence is promoted to primary, subtrees are relocated, and any
expansion the old depth had blocked is performed then.  Without this, a
depth-capped concept could keep or lose its prerequisites depending purely on
which branch the learner explored first.
"""

from __future__ import annotations

import logging
import time
import uuid
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .concepts import (
    Concept,
    Expansion,
    KnowledgeStatus,
    Occurrence,
    Status,
    TraceNode,
    TraceTree,
    display_label,
    normalize_label,
)
from .errors import (
    ConflictingAssessment,
    CorruptLog,
    EmptyLabel,
    EmptyQuestion,
    UnknownConcept,
)
from .oracle.base import (
    EducationLevel,
    Oracle,
    OracleRequestContext,
    QuestionAnalysis,
)

logger = logging.getLogger(__name__)

DEFAULT_MAX_DEPTH = 3
MAX_MAX_DEPTH = 6


class Phase(str, Enum):
    ASSESSING = "assessing"
    COMPLETE = "complete"


class EventKind(str, Enum):
    STARTED = "started"
    ANALYZED = "analyzed"
    ASSESSED = "assessed"
    EXPANDED = "expanded"
    CAPPED = "capped"
    COMPLETED = "completed"


class CapReason(str, Enum):
    DEPTH = "depth"
    FUNDAMENTAL = "fundamental"


@dataclass
class SessionEvent:
    """One entry in the append-only session log."""

    seq: int
    kind: EventKind
    ts: float
    data: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"seq": self.seq, "kind": self.kind.value, "ts": self.ts, "data": self.data}

    @classmethod
    def from_dict(cls, raw: dict) -> "SessionEvent":
        try:
            return cls(
                seq=int(raw["seq"]),
                kind=EventKind(raw["kind"]),
                ts=float(raw["ts"]),
                data=dict(raw.get("data", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptLog(f"malformed event: {raw!r}") from exc


@dataclass
class Session:
    """One learner's trace: question, tree, statuses, and the event log."""

    session_id: str
    question: str
    education_level: EducationLevel
    max_depth: int
    tree: TraceTree
    analysis: QuestionAnalysis | None = None
    status: KnowledgeStatus = field(default_factory=KnowledgeStatus)
    concepts: dict[str, Concept] = field(default_factory=dict)
    expanded: set[str] = field(default_factory=set)
    phase: Phase = Phase.ASSESSING
    event_log: list[SessionEvent] = field(default_factory=list)
    created_at: float = 0.0
    updated_at: float = 0.0
    clock: Callable[[], float] = field(default=time.time, repr=False, compare=False)

    def concept(self, key: str) -> Concept:
        return self.concepts[key]

    def log_event(self, kind: EventKind, data: dict | None = None) -> SessionEvent:
        event = SessionEvent(
            seq=len(self.event_log), kind=kind, ts=self.clock(), data=data or {}
        )
        self.event_log.append(event)
        self.updated_at = event.ts
        return event


@dataclass
class PendingAssessment:
    node_id: int
    concept: Concept
    depth: int


@dataclass
class AssessmentOutcome:
    """What one submitted assessment changed."""

    new_nodes: list[TraceNode] = field(default_factory=list)
    duplicate_nodes: list[TraceNode] = field(default_factory=list)
    cap_reason: CapReason | None = None
    session_complete: bool = False


class _LogicalClock:
    """Deterministic clock for scripted runs: 0, 1, 2, ... seconds."""

    def __init__(self):
        self._tick = -1.0

    def __call__(self) -> float:
        self._tick += 1.0
        return self._tick


def _register(session: Session, label: str) -> Concept:
    """Return the session's concept for a label, creating it on first sight.

    The first-seen display casing wins, so replays and reorderings agree."""
    key = normalize_label(label)
    if key not in session.concepts:
        session.concepts[key] = Concept(key=key, label=display_label(label))
    return session.concepts[key]


def start_session(
    question: str,
    education_level: EducationLevel | str,
    oracle: Oracle,
    max_depth: int = DEFAULT_MAX_DEPTH,
    session_id: str | None = None,
    clock: Callable[[], float] | None = None,
) -> Session:
    """Analyze the question and surface its key concepts as depth-1 nodes."""
    if not question or not question.strip():
        raise EmptyQuestion("question must be non-empty")
    if not 1 <= max_depth <= MAX_MAX_DEPTH:
        raise ValueError(f"max_depth must be between 1 and {MAX_MAX_DEPTH}, got {max_depth}")
    level = EducationLevel.parse(education_level)
    question = question.strip()

    analysis = oracle.analyze_question(question, level)

    session = Session(
        session_id=session_id or uuid.uuid4().hex,
        question=question,
        education_level=level,
        max_depth=max_depth,
        tree=TraceTree.new_tree(question, max_depth=max_depth),
        clock=clock or time.time,
    )
    root = session.tree.root
    session.concepts[root.concept] = Concept(key=root.concept, label=display_label(question))

    started = session.log_event(
        EventKind.STARTED,
        {
            "session_id": session.session_id,
            "question": session.question,
            "education_level": level.value,
            "max_depth": max_depth,
        },
    )
    session.created_at = started.ts

    _apply_analysis(
        session,
        understanding=analysis.understanding,
        importance=analysis.importance,
        key_labels=[c.label for c in analysis.key_concepts],
    )
    session.log_event(
        EventKind.ANALYZED,
        {
            "understanding": analysis.understanding,
            "importance": analysis.importance,
            "key_concepts": [c.label for c in session.analysis.key_concepts],
        },
    )
    _recompute_phase(session)
    return session


def _apply_analysis(
    session: Session, *, understanding: str, importance: str, key_labels: list[str]
) -> None:
    """Attach the analysis and create one primary node per distinct key concept."""
    root = session.tree.root
    concepts: list[Concept] = []
    seen: set[str] = set()
    for label in key_labels:
        concept = _register(session, label)
        if concept.key in seen:
            logger.info("dropping duplicate key concept %r", label)
            continue
        if concept.key == root.concept:
            logger.info("dropping key concept %r equal to the target", label)
            continue
        seen.add(concept.key)
        concepts.append(concept)
        session.tree.add_child(root.node_id, concept)
    session.analysis = QuestionAnalysis(
        understanding=understanding, importance=importance, key_concepts=concepts
    )


def pending_assessments(session: Session) -> list[PendingAssessment]:
    """Primary-occurrence nodes whose concept is still unassessed, by node id.

    The root is the question's own target and is never assessed."""
    out = []
    for node in sorted(session.tree.nodes.values(), key=lambda n: n.node_id):
        if node.depth == 0 or node.occurrence is not Occurrence.PRIMARY:
            continue
        if session.status.get(node.concept) is Status.UNASSESSED:
            out.append(
                PendingAssessment(
                    node_id=node.node_id,
                    concept=session.concept(node.concept),
                    depth=node.depth,
                )
            )
    return out


def is_complete(session: Session) -> bool:
    """True once no assessment is pending."""
    return len(pending_assessments(session)) == 0


def _recompute_phase(session: Session, log: bool = True) -> None:
    complete = is_complete(session)
    if complete and session.phase is Phase.ASSESSING:
        session.phase = Phase.COMPLETE
        if log:
            session.log_event(EventKind.COMPLETED)
    elif not complete:
        session.phase = Phase.ASSESSING


def submit_assessment(
    session: Session,
    concept: str,
    known: bool,
    oracle: Oracle,
    force: bool = False,
) -> AssessmentOutcome:
    """Record one know / don't-know answer and expand if warranted.

    Re-submitting the value a concept already has is idempotent, except that an
    expansion which previously failed (oracle error) is retried.  Submitting
    the opposite value requires ``force``; a forced flip discards the concept's
    expansion subtree and re-runs the expansion rules.
    """
    try:
        key = normalize_label(concept)
    except EmptyLabel as exc:
        raise UnknownConcept(str(exc)) from exc
    primary = session.tree.primary_node(key)
    if primary is None or primary.depth == 0:
        raise UnknownConcept(f"no surfaced concept {key!r} in session {session.session_id}")

    desired = Status.KNOWN if known else Status.UNKNOWN
    current = session.status.get(key)
    outcome = AssessmentOutcome()

    if current is not Status.UNASSESSED:
        if current is desired:
            # Idempotent, unless an unknown concept still owes its expansion.
            if desired is Status.UNKNOWN and primary.expansion is Expansion.UNEXPANDED:
                try:
                    _run_expansions(session, [primary.node_id], oracle, outcome)
                finally:
                    _recompute_phase(session)
            outcome.session_complete = session.phase is Phase.COMPLETE
            return outcome
        if not force:
            raise ConflictingAssessment(
                f"{key!r} is already {current.value}; pass force to flip it"
            )
        session.log_event(EventKind.ASSESSED, {"concept": key, "known": known, "forced": True})
        queue = _apply_flip(session, key, desired)
        try:
            _run_expansions(
                session, queue, oracle, outcome,
                is_assessed_concept=desired is Status.UNKNOWN,
            )
        finally:
            _recompute_phase(session)
        outcome.session_complete = session.phase is Phase.COMPLETE
        return outcome

    session.status.assign(key, desired)
    session.log_event(EventKind.ASSESSED, {"concept": key, "known": known, "forced": False})
    if desired is Status.UNKNOWN:
        try:
            _run_expansions(session, [primary.node_id], oracle, outcome)
        finally:
            _recompute_phase(session)
    else:
        _recompute_phase(session)
    outcome.session_complete = session.phase is Phase.COMPLETE
    return outcome


def _apply_flip(session: Session, key: str, desired: Status) -> list[int]:
    """Flip an assessed concept, discarding its expansion subtree.

    Concepts whose primary node lived in the discarded subtree get a surviving
    duplicate promoted (if one exists) and become expansion candidates again.
    Returns the node ids to re-run expansion rules on, in deterministic order.
    """
    tree = session.tree
    primary = tree.primary_node(key)
    removed = tree.remove_descendants(primary.node_id)
    primary.expansion = Expansion.UNEXPANDED
    session.expanded.discard(key)
    session.status.assign(key, desired)

    candidates: list[int] = []
    removed_keys = {n.concept for n in removed if n.occurrence is Occurrence.PRIMARY}
    for orphan_key in sorted(removed_keys):
        session.expanded.discard(orphan_key)
        survivor = tree.reassign_primary(orphan_key)
        if survivor is not None and session.status.get(orphan_key) is Status.UNKNOWN:
            candidates.append(survivor.node_id)
    if desired is Status.UNKNOWN:
        candidates.insert(0, primary.node_id)
    return candidates


def _ancestor_context(session: Session, node: TraceNode) -> OracleRequestContext:
    chain_keys = session.tree.ancestor_keys(node.node_id)
    return OracleRequestContext(
        question=session.question,
        education_level=session.education_level,
        ancestor_chain=[session.concept(k).label for k in chain_keys],
    )


def _run_expansions(
    session: Session,
    initial: list[int],
    oracle: Oracle,
    outcome: AssessmentOutcome,
    *,
    is_assessed_concept: bool = True,
) -> None:
    """Process expansion candidates until the tree is stable.

    The first candidate is the concept just assessed, so its depth or
    fundamentality cap is reported on the outcome; candidates unlocked later by
    promotions expand silently (with their own events).
    """
    queue: list[int] = list(initial)
    seen: set[int] = set()
    first = True
    while queue:
        node_id = queue.pop(0)
        if node_id in seen or node_id not in session.tree.nodes:
            first = False
            continue
        seen.add(node_id)
        cap, unlocked = _expand_node(session, node_id, oracle, outcome)
        if first and is_assessed_concept:
            outcome.cap_reason = cap
        first = False
        queue.extend(unlocked)


def _expand_node(
    session: Session,
    node_id: int,
    oracle: Oracle,
    outcome: AssessmentOutcome,
) -> tuple[CapReason | None, list[int]]:
    """Expand one unknown primary node if the rules allow; returns the cap
    reason (if capped now) and any nodes a promotion made expandable."""
    tree = session.tree
    node = tree.node(node_id)
    key = node.concept
    concept = session.concept(key)

    if node.occurrence is not Occurrence.PRIMARY or session.status.get(key) is not Status.UNKNOWN:
        return None, []
    if node.expansion is Expansion.EXPANDED or key in session.expanded:
        return None, []
    if concept.fundamental or node.expansion is Expansion.FUNDAMENTAL:
        if node.expansion is not Expansion.FUNDAMENTAL:
            node.expansion = Expansion.FUNDAMENTAL
            session.log_event(
                EventKind.CAPPED, {"concept": key, "reason": CapReason.FUNDAMENTAL.value}
            )
        return CapReason.FUNDAMENTAL, []
    if node.depth >= session.max_depth:
        if node.expansion is not Expansion.DEPTH_CAPPED:
            node.expansion = Expansion.DEPTH_CAPPED
            session.log_event(EventKind.CAPPED, {"concept": key, "reason": CapReason.DEPTH.value})
        return CapReason.DEPTH, []

    result = oracle.extract_prereqs(concept, _ancestor_context(session, node))

    if result.fundamental:
        concept.fundamental = True
        node.expansion = Expansion.FUNDAMENTAL
        session.log_event(
            EventKind.CAPPED, {"concept": key, "reason": CapReason.FUNDAMENTAL.value}
        )
        return CapReason.FUNDAMENTAL, []

    placed_labels, unlocked = _place_children(
        session, node, [p.label for p in result.prerequisites], outcome
    )
    node.expansion = Expansion.EXPANDED
    session.expanded.add(key)
    session.log_event(EventKind.EXPANDED, {"concept": key, "prereqs": placed_labels})
    return None, unlocked


def _place_children(
    session: Session,
    parent: TraceNode,
    labels: list[str],
    outcome: AssessmentOutcome | None,
) -> tuple[list[str], list[int]]:
    """Attach prerequisite occurrences under a parent node.

    Labels matching an ancestor concept are dropped (untrusted oracle output);
    a new occurrence shallower than its concept's primary triggers promotion.
    Returns the labels actually placed and any expansion candidates unlocked.
    """
    tree = session.tree
    ancestors = set(tree.ancestor_keys(parent.node_id))
    placed: list[str] = []
    unlocked: list[int] = []
    for label in labels:
        concept = _register(session, label)
        if concept.key in ancestors:
            logger.info(
                "dropping prerequisite %r of %r: already on this branch",
                label, parent.concept,
            )
            continue
        node, occurrence = tree.add_child(parent.node_id, concept)
        placed.append(concept.label)
        if occurrence is Occurrence.PRIMARY:
            if outcome is not None:
                outcome.new_nodes.append(node)
        else:
            if outcome is not None:
                outcome.duplicate_nodes.append(node)
            unlocked.extend(_reconcile_depths(session, node))
    return placed, unlocked


def _reconcile_depths(session: Session, new_node: TraceNode) -> list[int]:
    """Promote duplicate occurrences that now sit shallower than their primary.

    Pure tree surgery plus a list of nodes whose expansion the old, deeper
    placement had blocked; promotion cascades through relocated subtrees.
    """
    tree = session.tree
    unlocked: list[int] = []
    stack = [new_node.node_id]
    while stack:
        nid = stack.pop(0)
        node = tree.nodes.get(nid)
        if node is None or node.occurrence is not Occurrence.DUPLICATE_REFERENCE:
            continue
        primary = tree.primary_node(node.concept)
        if primary is None or node.depth >= primary.depth:
            continue
        if tree.promotion_clash(nid, primary.node_id):
            logger.info(
                "skipping promotion of %r: relocation would repeat a branch concept",
                node.concept,
            )
            continue
        moved = tree.promote(nid)
        stack.extend(moved)
        for candidate in [nid, *moved]:
            cnode = tree.nodes[candidate]
            if (
                cnode.occurrence is Occurrence.PRIMARY
                and cnode.expansion is Expansion.UNEXPANDED
                and session.status.get(cnode.concept) is Status.UNKNOWN
                and cnode.depth < session.max_depth
            ):
                unlocked.append(candidate)
    return unlocked


def check_invariants(session: Session) -> list[str]:
    """Structural problems in the session, empty when it is well-formed."""
    problems: list[str] = []
    tree = session.tree
    primaries: dict[str, int] = {}
    for node in tree.nodes.values():
        if node.parent is not None:
            parent = tree.nodes.get(node.parent)
            if parent is None:
                problems.append(f"node {node.node_id} has a dangling parent {node.parent}")
                continue
            if node.depth != parent.depth + 1:
                problems.append(
                    f"node {node.node_id} depth {node.depth} != parent depth {parent.depth} + 1"
                )
            if node.node_id not in parent.children:
                problems.append(f"node {node.node_id} missing from its parent's children")
            chain = tree.ancestor_keys(node.parent)
            if node.concept in chain:
                problems.append(f"concept {node.concept!r} repeats along its own branch")
        if node.occurrence is Occurrence.PRIMARY:
            if node.concept in primaries:
                problems.append(f"concept {node.concept!r} has two primary occurrences")
            primaries[node.concept] = node.node_id
        else:
            if node.children:
                problems.append(f"duplicate node {node.node_id} has children")
            if node.expansion is not Expansion.UNEXPANDED:
                problems.append(f"duplicate node {node.node_id} is {node.expansion.value}")
        if node.depth > session.max_depth:
            problems.append(f"node {node.node_id} exceeds the depth bound")
    for node in tree.nodes.values():
        if node.depth > 0 and node.concept not in primaries:
            problems.append(f"concept {node.concept!r} has occurrences but no primary")
        if node.concept not in session.concepts:
            problems.append(f"concept {node.concept!r} is not registered")
    for key in session.expanded:
        if session.status.get(key) is not Status.UNKNOWN:
            problems.append(f"expanded concept {key!r} is not marked unknown")
    complete = is_complete(session)
    if complete != (session.phase is Phase.COMPLETE):
        problems.append(
            f"phase {session.phase.value} disagrees with pending assessments"
        )
    return problems


# Event-log replay


def replay(events: list[SessionEvent]) -> Session:
    """Rebuild a session from its event log, without any oracle.

    Expansion events carry the prerequisite labels that were placed, so the
    tree, statuses, expansion set, and phase are reconstructed exactly."""
    if not events:
        raise CorruptLog("empty event log")
    for i, event in enumerate(events):
        if event.seq != i:
            raise CorruptLog(f"event sequence gap: expected {i}, got {event.seq}")
    if events[0].kind is not EventKind.STARTED:
        raise CorruptLog(f"log must start with {EventKind.STARTED.value}")

    data = events[0].data
    try:
        session = Session(
            session_id=data["session_id"],
            question=data["question"],
            education_level=EducationLevel(data["education_level"]),
            max_depth=int(data["max_depth"]),
            tree=TraceTree.new_tree(data["question"], max_depth=int(data["max_depth"])),
        )
    except (KeyError, ValueError, EmptyLabel) as exc:
        raise CorruptLog(f"malformed start event: {exc}") from exc
    session.created_at = events[0].ts
    session.updated_at = events[0].ts
    root = session.tree.root
    session.concepts[root.concept] = Concept(
        key=root.concept, label=display_label(session.question)
    )

    for event in events[1:]:
        try:
            _apply_event(session, event)
        except CorruptLog:
            raise
        except Exception as exc:
            raise CorruptLog(f"event {event.seq} cannot be applied: {exc}") from exc
        session.updated_at = event.ts

    session.event_log = list(events)
    _recompute_phase(session, log=False)
    return session


def _apply_event(session: Session, event: SessionEvent) -> None:
    if event.kind is EventKind.STARTED:
        raise CorruptLog("duplicate start event")
    if event.kind is EventKind.ANALYZED:
        if session.analysis is not None:
            raise CorruptLog("duplicate analysis event")
        _apply_analysis(
            session,
            understanding=event.data.get("understanding", ""),
            importance=event.data.get("importance", ""),
            key_labels=list(event.data["key_concepts"]),
        )
        return
    if event.kind is EventKind.ASSESSED:
        key = event.data["concept"]
        desired = Status.KNOWN if event.data["known"] else Status.UNKNOWN
        if event.data.get("forced"):
            _apply_flip(session, key, desired)
        else:
            if session.tree.primary_node(key) is None:
                raise CorruptLog(f"assessment of unsurfaced concept {key!r}")
            session.status.assign(key, desired)
        return
    if event.kind is EventKind.EXPANDED:
        key = event.data["concept"]
        node = session.tree.primary_node(key)
        if node is None:
            raise CorruptLog(f"expansion of unsurfaced concept {key!r}")
        _place_children(session, node, list(event.data["prereqs"]), outcome=None)
        node.expansion = Expansion.EXPANDED
        session.expanded.add(key)
        return
    if event.kind is EventKind.CAPPED:
        key = event.data["concept"]
        node = session.tree.primary_node(key)
        if node is None:
            raise CorruptLog(f"cap on unsurfaced concept {key!r}")
        reason = CapReason(event.data["reason"])
        if reason is CapReason.FUNDAMENTAL:
            session.concept(key).fundamental = True
            node.expansion = Expansion.FUNDAMENTAL
        else:
            node.expansion = Expansion.DEPTH_CAPPED
        return
    if event.kind is EventKind.COMPLETED:
        return
    raise CorruptLog(f"unknown event kind {event.kind!r}")


# Snapshots


def snapshot(session: Session) -> dict:
    """JSON-ready view of everything replay reconstructs, plus identity fields."""
    analysis = session.analysis
    return {
        "session_id": session.session_id,
        "question": session.question,
        "education_level": session.education_level.value,
        "max_depth": session.max_depth,
        "analysis": {
            "understanding": analysis.understanding if analysis else "",
            "importance": analysis.importance if analysis else "",
            "key_concepts": [c.key for c in analysis.key_concepts] if analysis else [],
        },
        "concepts": {
            key: {"label": c.label, "fundamental": c.fundamental}
            for key, c in sorted(session.concepts.items())
        },
        "tree": session.tree.as_dict(),
        "status": session.status.as_dict(),
        "expanded": sorted(session.expanded),
        "phase": session.phase.value,
        "created_at": session.created_at,
        "updated_at": session.updated_at,
    }


def session_from_snapshot(doc: dict) -> Session:
    """Inflate a snapshot back into a session (event log attached separately)."""
    tree = TraceTree.from_dict(doc["tree"])
    session = Session(
        session_id=doc["session_id"],
        question=doc["question"],
        education_level=EducationLevel(doc["education_level"]),
        max_depth=doc["max_depth"],
        tree=tree,
        status=KnowledgeStatus.from_dict(doc["status"]),
        expanded=set(doc["expanded"]),
        phase=Phase(doc["phase"]),
        created_at=doc["created_at"],
        updated_at=doc["updated_at"],
    )
    session.concepts = {
        key: Concept(key=key, label=info["label"], fundamental=info["fundamental"])
        for key, info in doc["concepts"].items()
    }
    session.analysis = QuestionAnalysis(
        understanding=doc["analysis"]["understanding"],
        importance=doc["analysis"]["importance"],
        key_concepts=[session.concepts[k] for k in doc["analysis"]["key_concepts"]],
    )
    return session


def logical_clock() -> Callable[[], float]:
    """Clock for reproducible scripted runs; every call advances one second."""
    return _LogicalClock()
