import { badge, button, el } from "../dom.js";
import type { AppState, Store } from "../state.js";
import type { SessionView, TreeNode } from "../types.js";

const EDUCATION_LEVELS = [
  ["middle_school", "Middle school"],
  ["high_school", "High school"],
  ["undergraduate", "Undergraduate"],
  ["graduate", "Graduate"],
] as const;

function questionForm(store: Store, busy: boolean): HTMLElement {
  const form = el("form", "question-form");
  form.dataset.testid = "question-form";

  const question = el("textarea", "question-input");
  question.placeholder = "What do you want to understand?";
  question.rows = 3;
  question.dataset.testid = "question-input";

  const level = el("select", "level-select");
  level.dataset.testid = "level-select";
  for (const [value, label] of EDUCATION_LEVELS) {
    const option = el("option", "", label);
    option.value = value;
    level.appendChild(option);
  }
  level.value = "undergraduate";

  const submit = el("button", "primary", "Start tracing");
  submit.type = "submit";
  submit.dataset.testid = "start-button";
  submit.disabled = busy;

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = question.value.trim();
    if (text) void store.startSession(text, level.value);
  });

  form.append(question, level, submit);
  return form;
}

function analysisBlock(session: SessionView): HTMLElement {
  const block = el("section", "analysis");
  block.appendChild(el("h2", "", session.question));
  block.appendChild(el("p", "analysis-understanding", session.analysis.understanding));
  block.appendChild(el("p", "analysis-importance", session.analysis.importance));
  return block;
}

function conceptRow(node: TreeNode, state: AppState, store: Store): HTMLElement {
  const session = state.session as SessionView;
  const info = session.concepts[node.concept];
  const status = session.status[node.concept] ?? "unassessed";
  const isDuplicate = node.occurrence !== "primary";

  const row = el("div", `concept-row status-${status}`);
  row.dataset.concept = node.concept;
  row.dataset.nodeId = String(node.node_id);
  row.dataset.occurrence = node.occurrence;
  // indentation mirrors the tree: depth 1 sits flush, each level steps in
  row.style.paddingLeft = `${(node.depth - 1) * 28}px`;
  if (status === "known") row.classList.add("dimmed");

  row.appendChild(badge(`L${node.depth}`, "depth"));
  row.appendChild(el("span", "concept-label", info ? info.label : node.concept));
  if (status === "unknown") row.appendChild(el("span", "marker marker-unknown", "✗"));
  if (status === "known") row.appendChild(el("span", "marker marker-known", "✓"));
  if (info?.fundamental) row.appendChild(badge("fundamental", "fundamental"));
  if (node.expansion === "depth_capped") row.appendChild(badge("depth cap", "capped"));

  if (isDuplicate) {
    row.appendChild(badge("Already confirmed", "duplicate"));
    return row;
  }

  const actions = el("span", "row-actions");
  const disabled = state.busy || status !== "unassessed";
  const know = button("I know this", "know", () => void store.assess(node.concept, true));
  know.dataset.testid = `know-${node.node_id}`;
  know.disabled = disabled;
  const dontKnow = button("I don't know this", "dont-know", () => void store.assess(node.concept, false));
  dontKnow.dataset.testid = `dont-know-${node.node_id}`;
  dontKnow.disabled = disabled;
  actions.append(know, dontKnow);
  row.appendChild(actions);
  return row;
}

function conceptTree(state: AppState, store: Store): HTMLElement {
  const session = state.session as SessionView;
  const byId = new Map(session.tree.nodes.map((node) => [node.node_id, node]));
  const tree = el("div", "concept-tree");
  tree.dataset.testid = "concept-tree";

  const walk = (ids: number[]): void => {
    for (const id of ids) {
      const node = byId.get(id);
      if (!node) continue;
      tree.appendChild(conceptRow(node, state, store));
      walk(node.children);
    }
  };
  const root = byId.get(session.tree.root_id);
  walk(root ? root.children : []);
  return tree;
}

export function renderAssessment(container: HTMLElement, store: Store): void {
  const state = store.getState();
  container.innerHTML = "";

  if (!state.session) {
    container.appendChild(questionForm(store, state.busy));
    return;
  }

  container.appendChild(analysisBlock(state.session));
  if (state.session.phase === "complete") {
    const done = el("p", "phase-complete", "All concepts assessed. See the learning path tab.");
    done.dataset.testid = "phase-complete";
    container.appendChild(done);
  }
  container.appendChild(conceptTree(state, store));
}
