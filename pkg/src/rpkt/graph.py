"""Merged concept graph: one node per concept, occurrences collapsed.

Node order (by depth, then key) and edge order (lexicographic) are derived
from session state alone, so two sessions that reached the same state render
byte-identical exports.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .concepts import Occurrence, Status
from .engine import Session

_STATUS_COLORS = {
    Status.KNOWN: "palegreen",
    Status.UNKNOWN: "salmon",
    Status.UNASSESSED: "lightskyblue",
}
_ROOT_COLOR = "gold"


@dataclass
class GraphNode:
    key: str
    label: str
    depth: int
    status: Status
    fundamental: bool
    expansion: str
    occurrences: int
    is_root: bool = False


@dataclass
class ConceptGraph:
    """Deduplicated prerequisite graph for one session."""

    question: str
    nodes: list[GraphNode] = field(default_factory=list)
    edges: list[tuple[str, str]] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "question": self.question,
            "nodes": [
                {
                    "key": n.key,
                    "label": n.label,
                    "depth": n.depth,
                    "status": n.status.value,
                    "fundamental": n.fundamental,
                    "expansion": n.expansion,
                    "occurrences": n.occurrences,
                    "is_root": n.is_root,
                }
                for n in self.nodes
            ],
            "edges": [{"source": s, "target": t} for s, t in self.edges],
        }


def build_graph(session: Session) -> ConceptGraph:
    """Collapse the occurrence tree into the concept graph."""
    tree = session.tree
    root_key = tree.root.concept
    occurrence_counts: dict[str, int] = {}
    for node in tree.nodes.values():
        occurrence_counts[node.concept] = occurrence_counts.get(node.concept, 0) + 1

    nodes: list[GraphNode] = []
    edge_set: set[tuple[str, str]] = set()
    for node in tree.nodes.values():
        if node.occurrence is not Occurrence.PRIMARY:
            continue
        nodes.append(
            GraphNode(
                key=node.concept,
                label=session.concept(node.concept).label,
                depth=node.depth,
                status=session.status.get(node.concept),
                fundamental=session.concept(node.concept).fundamental,
                expansion=node.expansion.value,
                occurrences=occurrence_counts[node.concept],
                is_root=node.concept == root_key,
            )
        )
        for child_id in node.children:
            edge_set.add((node.concept, tree.node(child_id).concept))

    nodes.sort(key=lambda n: (n.depth, n.key))
    return ConceptGraph(
        question=session.question, nodes=nodes, edges=sorted(edge_set)
    )


def render_dot(graph: ConceptGraph) -> str:
    """Graphviz source with status colors: green known, red unknown, blue unassessed."""
    ids = {node.key: f"n{i}" for i, node in enumerate(graph.nodes)}
    lines = [
        "digraph prerequisites {",
        "  rankdir=TB;",
        '  node [style=filled, fontname="Helvetica"];',
    ]
    for node in graph.nodes:
        color = _ROOT_COLOR if node.is_root else _STATUS_COLORS[node.status]
        shape = "doubleoctagon" if node.is_root else "box"
        label = node.label.replace("\\", "\\\\").replace('"', '\\"')
        if node.fundamental:
            label += "\\n(fundamental)"
        lines.append(
            f'  {ids[node.key]} [label="{label}", shape={shape}, fillcolor="{color}"];'
        )
    for source, target in graph.edges:
        lines.append(f"  {ids[source]} -> {ids[target]};")
    lines.append("}")
    return "\n".join(lines) + "\n"
