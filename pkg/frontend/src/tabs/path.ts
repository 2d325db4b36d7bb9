import { button, el } from "../dom.js";
import type { Store } from "../state.js";

export function renderPath(container: HTMLElement, store: Store): void {
  const state = store.getState();
  container.innerHTML = "";

  const { path, session } = state;
  if (!path || !session) {
    container.appendChild(el("p", "placeholder", "Start a session to build a learning path."));
    return;
  }

  const heading = el("section", "path-header");
  heading.appendChild(el("h2", "", path.question));
  heading.appendChild(
    el(
      "p",
      "path-status",
      path.complete ? "Assessment complete." : "Assessment still in progress.",
    ),
  );
  container.appendChild(heading);

  if (path.known.length > 0) {
    const knownList = el("ul", "known-list");
    knownList.dataset.testid = "known-list";
    for (const label of path.known) {
      knownList.appendChild(el("li", "known-item dimmed", `✓ ${label}`));
    }
    const section = el("section", "path-known");
    section.appendChild(el("h3", "", "Already known"));
    section.appendChild(knownList);
    container.appendChild(section);
  }

  const steps = el("ol", "path-steps");
  steps.dataset.testid = "path-steps";
  for (const step of path.steps) {
    const item = el("li", "path-step");
    item.dataset.concept = step.concept;
    // steps are ordered prerequisites-first; indent by depth to keep the hierarchy visible
    item.style.marginLeft = `${step.depth * 20}px`;
    const text = step.fundamental ? `${step.label} (fundamental)` : step.label;
    item.appendChild(el("span", "marker marker-unknown", "✗"));
    item.appendChild(el("span", "step-label", `[L${step.depth}] ${text}`));
    steps.appendChild(item);
  }
  for (const label of path.pending) {
    const item = el("li", "path-step pending");
    item.appendChild(el("span", "marker marker-pending", "?"));
    item.appendChild(el("span", "step-label", `${label} (not assessed yet)`));
    steps.appendChild(item);
  }
  const section = el("section", "path-learn");
  section.appendChild(el("h3", "", "To learn, in order"));
  if (steps.childElementCount === 0) {
    section.appendChild(el("p", "placeholder", "Nothing to learn yet: no gaps found so far."));
  } else {
    section.appendChild(steps);
  }
  container.appendChild(section);

  const explain = el("section", "path-explanation");
  const generate = button("Generate explanation", "primary", () => void store.explain());
  generate.dataset.testid = "explain-button";
  generate.disabled = state.busy || !store.canExplain();
  if (!store.canExplain()) {
    generate.title = "Answer at least one assessment first";
  }
  explain.appendChild(generate);
  if (state.explanation !== null) {
    const text = el("pre", "explanation-text", state.explanation);
    text.dataset.testid = "explanation-text";
    explain.appendChild(text);
  }
  container.appendChild(explain);
}
