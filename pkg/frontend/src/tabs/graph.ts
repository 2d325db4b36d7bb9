import { el, svgEl } from "../dom.js";
import { forceLayout } from "../force.js";
import type { Store } from "../state.js";
import type { Status } from "../types.js";

export const STATUS_COLORS: Record<Status, string> = {
  known: "#2e7d32",
  unknown: "#c62828",
  unassessed: "#1565c0",
};

const WIDTH = 760;
const HEIGHT = 520;

/** Node size shrinks with depth so the question stands out over leaf prerequisites. */
export function nodeRadius(depth: number): number {
  return Math.max(24 - depth * 4, 8);
}

export function renderGraph(container: HTMLElement, store: Store): void {
  const { graph } = store.getState();
  container.innerHTML = "";

  if (!graph) {
    container.appendChild(el("p", "placeholder", "Start a session to see the concept graph."));
    return;
  }

  const svg = svgEl("svg", {
    width: WIDTH,
    height: HEIGHT,
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
  });
  svg.dataset.testid = "concept-graph";

  const positions = forceLayout(
    graph.nodes.map((node) => node.key),
    graph.edges,
    WIDTH,
    HEIGHT,
  );

  for (const edge of graph.edges) {
    const from = positions.get(edge.source);
    const to = positions.get(edge.target);
    if (!from || !to) continue;
    svg.appendChild(
      svgEl("line", {
        x1: from.x.toFixed(1),
        y1: from.y.toFixed(1),
        x2: to.x.toFixed(1),
        y2: to.y.toFixed(1),
        class: "graph-edge",
        stroke: "#9e9e9e",
        "stroke-width": 1.5,
      }),
    );
  }

  for (const node of graph.nodes) {
    const pos = positions.get(node.key);
    if (!pos) continue;
    const group = svgEl("g", { class: "graph-node" });
    const circle = svgEl("circle", {
      cx: pos.x.toFixed(1),
      cy: pos.y.toFixed(1),
      r: nodeRadius(node.depth),
      fill: STATUS_COLORS[node.status],
      "data-key": node.key,
      "data-status": node.status,
      "data-depth": node.depth,
    });
    if (node.is_root) {
      circle.setAttribute("stroke", "#f9a825");
      circle.setAttribute("stroke-width", "3");
      circle.setAttribute("data-root", "true");
    }
    const title = svgEl("title");
    title.textContent = `${node.label} (${node.status}, seen ${node.occurrences}x)`;
    circle.appendChild(title);
    const label = svgEl("text", {
      x: pos.x.toFixed(1),
      y: (pos.y + nodeRadius(node.depth) + 12).toFixed(1),
      "text-anchor": "middle",
      class: "graph-label",
    });
    label.textContent = node.label;
    group.append(circle, label);
    svg.appendChild(group);
  }

  const legend = el("div", "graph-legend");
  for (const [status, color] of Object.entries(STATUS_COLORS)) {
    const item = el("span", "legend-item", status);
    const swatch = el("span", "legend-swatch");
    swatch.style.backgroundColor = color;
    item.prepend(swatch);
    legend.appendChild(item);
  }

  container.append(svg, legend);
}
