import { ApiClient, ApiError } from "./api.js";
import type { GraphDoc, PathDoc, SessionView } from "./types.js";

export type TabName = "assessment" | "graph" | "path";

export interface AppState {
  session: SessionView | null;
  graph: GraphDoc | null;
  path: PathDoc | null;
  explanation: string | null;
  busy: boolean;
  error: string | null;
  tab: TabName;
}

function initialState(): AppState {
  return {
    session: null,
    graph: null,
    path: null,
    explanation: null,
    busy: false,
    error: null,
    tab: "assessment",
  };
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return err.retryable ? `${err.message} (safe to retry)` : err.message;
  }
  return err instanceof Error ? err.message : String(err);
}

/**
 * Single source of truth for the UI. Every view renders straight from the
 * payloads the server returned; state changes only after the server has
 * acknowledged the request, never optimistically.
 */
export class Store {
  private state = initialState();
  private listeners = new Set<(state: AppState) => void>();

  constructor(private readonly api: ApiClient) {}

  getState(): AppState {
    return this.state;
  }

  subscribe(listener: (state: AppState) => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private set(patch: Partial<AppState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  switchTab(tab: TabName): void {
    if (tab !== this.state.tab) this.set({ tab });
  }

  private async refreshDocs(sessionId: string): Promise<{ graph: GraphDoc; path: PathDoc }> {
    const [graph, path] = await Promise.all([
      this.api.getGraph(sessionId),
      this.api.getPath(sessionId),
    ]);
    return { graph, path };
  }

  async startSession(question: string, educationLevel: string): Promise<void> {
    if (this.state.busy) return;
    this.set({ busy: true, error: null });
    try {
      const session = await this.api.startSession(question, educationLevel);
      const docs = await this.refreshDocs(session.session_id);
      this.set({ session, ...docs, explanation: null, busy: false });
    } catch (err) {
      this.set({ busy: false, error: describe(err) });
    }
  }

  async assess(conceptId: string, known: boolean): Promise<void> {
    const session = this.state.session;
    if (!session || this.state.busy) return;
    this.set({ busy: true, error: null });
    try {
      const response = await this.api.submitAssessment(session.session_id, conceptId, known);
      const docs = await this.refreshDocs(session.session_id);
      // any answer changes what an explanation would say, so drop the old one
      this.set({ session: response.session, ...docs, explanation: null, busy: false });
    } catch (err) {
      this.set({ busy: false, error: describe(err) });
    }
  }

  canExplain(): boolean {
    const session = this.state.session;
    return session !== null && Object.keys(session.status).length > 0;
  }

  async explain(): Promise<void> {
    const session = this.state.session;
    if (!session || this.state.busy || !this.canExplain()) return;
    this.set({ busy: true, error: null });
    try {
      const response = await this.api.generateExplanation(session.session_id);
      this.set({ explanation: response.explanation, busy: false });
    } catch (err) {
      this.set({ busy: false, error: describe(err) });
    }
  }
}
