import { readFileSync } from "node:fs";
import { resolve } from "node:path";
import { vi } from "vitest";
import { ApiClient } from "../src/api.js";
import { createApp } from "../src/app.js";
import type { AppState, Store } from "../src/state.js";
import type { GraphDoc, PathDoc, SessionView } from "../src/types.js";

export function fixture<T>(name: string): T {
  const path = resolve(process.cwd(), "tests", "fixtures", `${name}.json`);
  return JSON.parse(readFileSync(path, "utf8")) as T;
}

export const SESSION_ID = fixture<SessionView>("session_fresh").session_id;

export interface StubRoute {
  method: string;
  /** Suffix the request URL must end with, e.g. "/api/v1/sessions". */
  path: string;
  /** Served in order; the last one repeats once the queue drains. */
  responses: unknown[];
  status?: number;
  /** Response is withheld until this promise resolves. */
  gate?: Promise<void>;
}

export interface RecordedCall {
  method: string;
  url: string;
  body: unknown;
}

export function stubFetch(routes: StubRoute[]): RecordedCall[] {
  const calls: RecordedCall[] = [];
  vi.stubGlobal("fetch", async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = typeof input === "string" ? input : input instanceof URL ? input.href : input.url;
    const method = (init?.method ?? "GET").toUpperCase();
    calls.push({ method, url, body: init?.body ? JSON.parse(String(init.body)) : null });
    const route = routes.find((r) => r.method === method && url.endsWith(r.path));
    if (!route) throw new Error(`no stub for ${method} ${url}`);
    if (route.gate) await route.gate;
    const payload = route.responses.length > 1 ? route.responses.shift() : route.responses[0];
    return new Response(JSON.stringify(payload), {
      status: route.status ?? 200,
      headers: { "Content-Type": "application/json" },
    });
  });
  return calls;
}

/** Waits out the fetch/json/render promise chains kicked off by an action. */
export async function flush(): Promise<void> {
  for (let i = 0; i < 4; i++) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

export function mountApp(): { store: Store; root: HTMLElement } {
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.getElementById("app") as HTMLElement;
  const store = createApp(root, new ApiClient(""));
  return { store, root };
}

export function freshSessionRoutes(): StubRoute[] {
  return [
    { method: "POST", path: "/api/v1/sessions", responses: [fixture("session_fresh")] },
    { method: "GET", path: `/sessions/${SESSION_ID}/graph`, responses: [fixture("graph_fresh")] },
    { method: "GET", path: `/sessions/${SESSION_ID}/path`, responses: [fixture("path_fresh")] },
  ];
}

/** Mounts the app and drives the question form to a freshly started session. */
export async function startFreshSession(
  extraRoutes: StubRoute[] = [],
): Promise<{ store: Store; root: HTMLElement; calls: RecordedCall[] }> {
  const calls = stubFetch([...freshSessionRoutes(), ...extraRoutes]);
  const { store, root } = mountApp();
  const question = root.querySelector<HTMLTextAreaElement>('[data-testid="question-input"]');
  const form = root.querySelector<HTMLFormElement>('[data-testid="question-form"]');
  if (!question || !form) throw new Error("question form not rendered");
  question.value = "How does backpropagation work in neural networks?";
  form.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
  await flush();
  return { store, root, calls };
}

/** Store stand-in for rendering a tab directly from a canned state. */
export function fakeStore(patch: Partial<AppState>): Store {
  const state: AppState = {
    session: null,
    graph: null,
    path: null,
    explanation: null,
    busy: false,
    error: null,
    tab: "assessment",
    ...patch,
  };
  const stub = {
    getState: () => state,
    canExplain: () =>
      state.session !== null && Object.keys(state.session.status).length > 0,
    startSession: vi.fn(async () => {}),
    assess: vi.fn(async () => {}),
    explain: vi.fn(async () => {}),
    switchTab: vi.fn(),
    subscribe: () => () => {},
  };
  return stub as unknown as Store;
}

export type { AppState, GraphDoc, PathDoc, SessionView };
