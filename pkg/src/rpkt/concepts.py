"""Concept identity and the occurrence tree shared by the engine, path, and graph views.

A concept is identified by a normalized string key (lowercased, inner whitespace
collapsed, surrounding punctuation stripped), so "Gradient Descent" and
"gradient   descent" are one concept.  The trace tree records every *occurrence*
of a concept per branch; the first occurrence is primary and owns children,
later ones are duplicate references.
"""

from __future__ import annotations

import logging
import string
from dataclasses import dataclass, field
from enum import Enum

from .errors import CycleDetected, DepthExceeded, EmptyLabel

logger = logging.getLogger(__name__)

_STRIP_CHARS = string.punctuation + string.whitespace


def normalize_label(raw: str) -> str:
    """Return the canonical key for a concept label.

    Lowercases, collapses internal whitespace, and strips surrounding
    punctuation.  Idempotent.  Raises :class:`EmptyLabel` if nothing is left.
    """
    if not isinstance(raw, str):
        raise EmptyLabel(f"label must be a string, got {type(raw).__name__}")
    key = " ".join(raw.split()).lower().strip(_STRIP_CHARS)
    key = " ".join(key.split())
    if not key:
        raise EmptyLabel(f"label {raw!r} is empty after normalization")
    return key


def display_label(raw: str) -> str:
    """Whitespace-trimmed label preserving the original casing."""
    return " ".join(raw.split())


class Status(str, Enum):
    UNASSESSED = "unassessed"
    KNOWN = "known"
    UNKNOWN = "unknown"


class Occurrence(str, Enum):
    PRIMARY = "primary"
    DUPLICATE_REFERENCE = "duplicate_reference"


class Expansion(str, Enum):
    UNEXPANDED = "unexpanded"
    EXPANDED = "expanded"
    DEPTH_CAPPED = "depth_capped"
    FUNDAMENTAL = "fundamental"


@dataclass
class Concept:
    """A named concept: normalized key, display label, and fundamentality flag."""

    key: str
    label: str
    fundamental: bool = False

    @classmethod
    def from_label(cls, raw: str, fundamental: bool = False) -> "Concept":
        return cls(key=normalize_label(raw), label=display_label(raw), fundamental=fundamental)


class KnowledgeStatus:
    """Per-concept assessment state, shared by every occurrence of the concept.

    Once a concept is known or unknown it never reverts to unassessed; flips
    between known and unknown are the engine's job to police.
    """

    def __init__(self, states: dict[str, Status] | None = None):
        self._states: dict[str, Status] = dict(states or {})

    def get(self, key: str) -> Status:
        return self._states.get(key, Status.UNASSESSED)

    def assign(self, key: str, status: Status) -> None:
        if status is Status.UNASSESSED:
            raise ValueError("a concept's status never reverts to unassessed")
        self._states[key] = status

    def assessed_items(self) -> list[tuple[str, Status]]:
        return sorted(self._states.items())

    def as_dict(self) -> dict[str, str]:
        return {k: v.value for k, v in sorted(self._states.items())}

    @classmethod
    def from_dict(cls, data: dict[str, str]) -> "KnowledgeStatus":
        return cls({k: Status(v) for k, v in data.items()})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, KnowledgeStatus) and self._states == other._states

    def __len__(self) -> int:
        return len(self._states)


@dataclass
class TraceNode:
    """One occurrence of a concept in the trace tree."""

    node_id: int
    concept: str
    depth: int
    parent: int | None
    children: list[int] = field(default_factory=list)
    occurrence: Occurrence = Occurrence.PRIMARY
    expansion: Expansion = Expansion.UNEXPANDED


@dataclass
class TraceTree:
    """Occurrence tree rooted at the target question.

    Node ids are monotonically increasing integers scoped to the session, so a
    fixed operation sequence always yields the same ids.
    """

    max_depth: int
    nodes: dict[int, TraceNode] = field(default_factory=dict)
    root_id: int = 0
    next_node_id: int = 0

    @classmethod
    def new_tree(cls, question: str, max_depth: int = 3) -> "TraceTree":
        """Create a tree whose single root node is the normalized question."""
        key = normalize_label(question)
        tree = cls(max_depth=max_depth)
        root = TraceNode(node_id=0, concept=key, depth=0, parent=None)
        tree.nodes[0] = root
        tree.root_id = 0
        tree.next_node_id = 1
        return tree

    @property
    def root(self) -> TraceNode:
        return self.nodes[self.root_id]

    def node(self, node_id: int) -> TraceNode:
        return self.nodes[node_id]

    def ancestor_keys(self, node_id: int) -> list[str]:
        """Concept keys on the path from the root to the node, inclusive."""
        chain: list[str] = []
        current: int | None = node_id
        while current is not None:
            node = self.nodes[current]
            chain.append(node.concept)
            current = node.parent
        chain.reverse()
        return chain

    def primary_node(self, key: str) -> TraceNode | None:
        for node in self.nodes.values():
            if node.concept == key and node.occurrence is Occurrence.PRIMARY:
                return node
        return None

    def occurrences(self, key: str) -> list[TraceNode]:
        return sorted(
            (n for n in self.nodes.values() if n.concept == key),
            key=lambda n: n.node_id,
        )

    def add_child(self, parent_id: int, concept: Concept) -> tuple[TraceNode, Occurrence]:
        """Append a new occurrence of ``concept`` under ``parent_id``.

        The new node is primary iff no primary occurrence of the concept exists
        anywhere in the tree.  Raises :class:`DepthExceeded` when the parent
        already sits at the maximum depth and :class:`CycleDetected` when the
        concept equals any ancestor of the parent.
        """
        parent = self.nodes[parent_id]
        if parent.depth >= self.max_depth:
            raise DepthExceeded(
                f"cannot add {concept.key!r}: parent {parent.concept!r} is at depth {parent.depth}"
            )
        if concept.key in self.ancestor_keys(parent_id):
            raise CycleDetected(
                f"{concept.key!r} already appears on the path to {parent.concept!r}"
            )
        occurrence = (
            Occurrence.DUPLICATE_REFERENCE
            if self.primary_node(concept.key) is not None
            else Occurrence.PRIMARY
        )
        node = TraceNode(
            node_id=self.next_node_id,
            concept=concept.key,
            depth=parent.depth + 1,
            parent=parent_id,
            occurrence=occurrence,
        )
        self.next_node_id += 1
        self.nodes[node.node_id] = node
        parent.children.append(node.node_id)
        return node, occurrence

    def subtree_ids(self, node_id: int) -> list[int]:
        """Ids of the node and all descendants, in traversal order."""
        out: list[int] = []
        stack = [node_id]
        while stack:
            nid = stack.pop(0)
            out.append(nid)
            stack[0:0] = self.nodes[nid].children
        return out

    def promotion_clash(self, new_node_id: int, old_primary_id: int) -> bool:
        """True when relocating the old primary's subtree under the new node
        would put a concept on a path that already contains it."""
        chain = set(self.ancestor_keys(new_node_id))
        for nid in self.subtree_ids(old_primary_id):
            if nid == old_primary_id:
                continue
            if self.nodes[nid].concept in chain:
                return True
        return False

    def promote(self, new_primary_id: int) -> list[int]:
        """Make a shallower duplicate occurrence the primary one.

        Children of the old primary are reparented under the new node with
        their depths recomputed; the old primary becomes a childless duplicate
        reference.  Returns the ids of every node whose depth changed.
        Callers must check :meth:`promotion_clash` first.
        """
        new_node = self.nodes[new_primary_id]
        old = self.primary_node(new_node.concept)
        if old is None or old.node_id == new_primary_id:
            raise ValueError("promote requires an existing distinct primary occurrence")
        if new_node.depth >= old.depth:
            raise ValueError("promotion target must be strictly shallower")

        new_node.occurrence = Occurrence.PRIMARY
        new_node.expansion = old.expansion
        new_node.children = old.children
        old.children = []
        old.occurrence = Occurrence.DUPLICATE_REFERENCE
        old.expansion = Expansion.UNEXPANDED

        moved: list[int] = []
        stack = list(new_node.children)
        for child_id in new_node.children:
            self.nodes[child_id].parent = new_primary_id
        while stack:
            nid = stack.pop(0)
            node = self.nodes[nid]
            node.depth = self.nodes[node.parent].depth + 1
            moved.append(nid)
            stack.extend(node.children)
        if new_node.expansion is Expansion.DEPTH_CAPPED and new_node.depth < self.max_depth:
            new_node.expansion = Expansion.UNEXPANDED
        return moved

    def remove_descendants(self, node_id: int) -> list[TraceNode]:
        """Delete every descendant of the node; returns the removed nodes."""
        removed_ids = self.subtree_ids(node_id)[1:]
        removed = [self.nodes.pop(nid) for nid in removed_ids]
        self.nodes[node_id].children = []
        return removed

    def reassign_primary(self, key: str) -> TraceNode | None:
        """Promote a surviving occurrence of a concept whose primary node was
        removed: shallowest first, then lowest id.  Returns the new primary."""
        survivors = self.occurrences(key)
        if not survivors:
            return None
        if any(n.occurrence is Occurrence.PRIMARY for n in survivors):
            return next(n for n in survivors if n.occurrence is Occurrence.PRIMARY)
        chosen = min(survivors, key=lambda n: (n.depth, n.node_id))
        chosen.occurrence = Occurrence.PRIMARY
        chosen.expansion = Expansion.UNEXPANDED
        return chosen

    def as_dict(self) -> dict:
        return {
            "max_depth": self.max_depth,
            "root_id": self.root_id,
            "next_node_id": self.next_node_id,
            "nodes": [
                {
                    "node_id": n.node_id,
                    "concept": n.concept,
                    "depth": n.depth,
                    "parent": n.parent,
                    "children": list(n.children),
                    "occurrence": n.occurrence.value,
                    "expansion": n.expansion.value,
                }
                for n in sorted(self.nodes.values(), key=lambda n: n.node_id)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TraceTree":
        tree = cls(
            max_depth=data["max_depth"],
            root_id=data["root_id"],
            next_node_id=data["next_node_id"],
        )
        for nd in data["nodes"]:
            tree.nodes[nd["node_id"]] = TraceNode(
                node_id=nd["node_id"],
                concept=nd["concept"],
                depth=nd["depth"],
                parent=nd["parent"],
                children=list(nd["children"]),
                occurrence=Occurrence(nd["occurrence"]),
                expansion=Expansion(nd["expansion"]),
            )
        return tree
