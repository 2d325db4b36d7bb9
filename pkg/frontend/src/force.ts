import type { GraphEdge } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

/** Mulberry32: small seeded PRNG so layouts are reproducible across renders. */
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/**
 * Force-directed layout (Fruchterman-Reingold). Pure function of its inputs:
 * same keys, edges and frame always produce the same positions.
 */
export function forceLayout(
  keys: string[],
  edges: GraphEdge[],
  width: number,
  height: number,
  iterations = 150,
): Map<string, Point> {
  const positions = new Map<string, Point>();
  if (keys.length === 0) return positions;
  if (keys.length === 1) {
    positions.set(keys[0], { x: width / 2, y: height / 2 });
    return positions;
  }

  const rand = mulberry32(0x5eed);
  const index = new Map(keys.map((key, i) => [key, i]));
  const xs = new Array<number>(keys.length);
  const ys = new Array<number>(keys.length);
  for (let i = 0; i < keys.length; i++) {
    // spread on a ring plus jitter so symmetric graphs still untangle
    const angle = (2 * Math.PI * i) / keys.length;
    xs[i] = width / 2 + (width / 3) * Math.cos(angle) + (rand() - 0.5) * 10;
    ys[i] = height / 2 + (height / 3) * Math.sin(angle) + (rand() - 0.5) * 10;
  }

  const pairs: Array<[number, number]> = [];
  for (const edge of edges) {
    const a = index.get(edge.source);
    const b = index.get(edge.target);
    if (a !== undefined && b !== undefined && a !== b) pairs.push([a, b]);
  }

  const area = width * height;
  const k = Math.sqrt(area / keys.length);
  let temperature = width / 8;
  const cool = temperature / (iterations + 1);

  const dx = new Array<number>(keys.length);
  const dy = new Array<number>(keys.length);
  for (let step = 0; step < iterations; step++) {
    dx.fill(0);
    dy.fill(0);
    for (let i = 0; i < keys.length; i++) {
      for (let j = i + 1; j < keys.length; j++) {
        let vx = xs[i] - xs[j];
        let vy = ys[i] - ys[j];
        let dist = Math.hypot(vx, vy);
        if (dist < 0.01) {
          // nudge coincident nodes apart deterministically
          vx = 0.01 * (((i + j) % 3) - 1 || 1);
          vy = 0.01;
          dist = Math.hypot(vx, vy);
        }
        const repulse = (k * k) / dist;
        dx[i] += (vx / dist) * repulse;
        dy[i] += (vy / dist) * repulse;
        dx[j] -= (vx / dist) * repulse;
        dy[j] -= (vy / dist) * repulse;
      }
    }
    for (const [a, b] of pairs) {
      const vx = xs[a] - xs[b];
      const vy = ys[a] - ys[b];
      const dist = Math.max(Math.hypot(vx, vy), 0.01);
      const attract = (dist * dist) / k;
      dx[a] -= (vx / dist) * attract;
      dy[a] -= (vy / dist) * attract;
      dx[b] += (vx / dist) * attract;
      dy[b] += (vy / dist) * attract;
    }
    for (let i = 0; i < keys.length; i++) {
      const disp = Math.max(Math.hypot(dx[i], dy[i]), 0.01);
      const limited = Math.min(disp, temperature);
      xs[i] += (dx[i] / disp) * limited;
      ys[i] += (dy[i] / disp) * limited;
    }
    temperature = Math.max(temperature - cool, 0.01);
  }

  // normalize into the frame with a margin for node radii and labels
  const margin = 46;
  const minX = Math.min(...xs);
  const maxX = Math.max(...xs);
  const minY = Math.min(...ys);
  const maxY = Math.max(...ys);
  const spanX = Math.max(maxX - minX, 1);
  const spanY = Math.max(maxY - minY, 1);
  for (let i = 0; i < keys.length; i++) {
    positions.set(keys[i], {
      x: margin + ((xs[i] - minX) / spanX) * (width - 2 * margin),
      y: margin + ((ys[i] - minY) / spanY) * (height - 2 * margin),
    });
  }
  return positions;
}
