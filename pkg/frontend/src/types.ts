/** Payload shapes returned by the rpkt HTTP API (v1). */

export type Status = "known" | "unknown" | "unassessed";

export type Occurrence = "primary" | "duplicate_reference";

export type Expansion = "unexpanded" | "expanded" | "fundamental" | "depth_capped";

export interface KeyConcept {
  key: string;
  label: string;
}

export interface Analysis {
  understanding: string;
  importance: string;
  key_concepts: KeyConcept[];
}

export interface TreeNode {
  node_id: number;
  concept: string;
  depth: number;
  parent: number | null;
  children: number[];
  occurrence: Occurrence;
  expansion: Expansion;
}

export interface Tree {
  max_depth: number;
  root_id: number;
  next_node_id: number;
  nodes: TreeNode[];
}

export interface ConceptInfo {
  label: string;
  fundamental: boolean;
}

export interface PendingItem {
  concept: string;
  label: string;
  depth: number;
  node_id: number;
}

export interface SessionView {
  session_id: string;
  question: string;
  education_level: string;
  max_depth: number;
  phase: string;
  created_at: number;
  updated_at: number;
  analysis: Analysis;
  concepts: Record<string, ConceptInfo>;
  tree: Tree;
  status: Record<string, Status>;
  pending: PendingItem[];
  sequence: string[];
}

export interface OutcomeConcept {
  key: string;
  node_id: number;
  depth: number;
}

export interface AssessmentOutcome {
  new_concepts: OutcomeConcept[];
  duplicate_concepts: OutcomeConcept[];
  cap_reason: string | null;
  session_complete: boolean;
}

export interface AssessmentResponse {
  outcome: AssessmentOutcome;
  pending: PendingItem[];
  phase: string;
  session: SessionView;
}

export interface GraphNode {
  key: string;
  label: string;
  depth: number;
  status: Status;
  fundamental: boolean;
  expansion: Expansion;
  occurrences: number;
  is_root: boolean;
}

export interface GraphEdge {
  source: string;
  target: string;
}

export interface GraphDoc {
  question: string;
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface PathStep {
  position: number;
  concept: string;
  label: string;
  depth: number;
  fundamental: boolean;
}

export interface PathDoc {
  question: string;
  education_level: string;
  complete: boolean;
  known: string[];
  pending: string[];
  steps: PathStep[];
  sequence: string[];
}

export interface ExplanationResponse {
  explanation: string;
  cached: boolean;
}

export interface HealthResponse {
  status: "ok" | "degraded";
  oracle_mode: string;
  oracle: Record<string, unknown>;
  oracle_healthy: boolean;
}
