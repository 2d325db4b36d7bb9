import { ApiClient } from "./api.js";
import { el } from "./dom.js";
import { Store, type TabName } from "./state.js";
import { renderAssessment } from "./tabs/assessment.js";
import { renderGraph } from "./tabs/graph.js";
import { renderPath } from "./tabs/path.js";

const TABS: Array<[TabName, string]> = [
  ["assessment", "Assessment"],
  ["graph", "Concept graph"],
  ["path", "Learning path"],
];

const RENDERERS: Record<TabName, (container: HTMLElement, store: Store) => void> = {
  assessment: renderAssessment,
  graph: renderGraph,
  path: renderPath,
};

export function createApp(root: HTMLElement, api: ApiClient): Store {
  const store = new Store(api);

  root.innerHTML = "";
  const header = el("header", "app-header");
  header.appendChild(el("h1", "", "Prerequisite tracer"));
  const nav = el("nav", "tab-bar");
  const tabButtons = new Map<TabName, HTMLButtonElement>();
  for (const [name, label] of TABS) {
    const tab = el("button", "tab", label);
    tab.type = "button";
    tab.dataset.testid = `tab-${name}`;
    tab.addEventListener("click", () => store.switchTab(name));
    tabButtons.set(name, tab);
    nav.appendChild(tab);
  }
  header.appendChild(nav);

  const errorBar = el("div", "error-bar");
  errorBar.dataset.testid = "error-bar";
  errorBar.hidden = true;

  const panel = el("main", "tab-panel");
  panel.dataset.testid = "tab-panel";

  root.append(header, errorBar, panel);

  const render = (): void => {
    const state = store.getState();
    for (const [name, tab] of tabButtons) {
      tab.classList.toggle("active", name === state.tab);
    }
    errorBar.hidden = state.error === null;
    errorBar.textContent = state.error ?? "";
    RENDERERS[state.tab](panel, store);
  };

  store.subscribe(render);
  render();
  return store;
}
