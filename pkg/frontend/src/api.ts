import type {
  AssessmentResponse,
  ExplanationResponse,
  GraphDoc,
  HealthResponse,
  PathDoc,
  SessionView,
} from "./types.js";

/** Error carrying the HTTP status and the server's retryable hint, when present. */
export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly retryable: boolean | null = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  if (!response.ok) {
    let message = `request failed with status ${response.status}`;
    let retryable: boolean | null = null;
    try {
      const body = await response.json();
      const detail = body?.detail;
      if (typeof detail === "string") {
        message = detail;
      } else if (detail && typeof detail === "object") {
        message = detail.message ?? message;
        retryable = detail.retryable ?? null;
      }
    } catch {
      // non-JSON error body; keep the generic message
    }
    throw new ApiError(message, response.status, retryable);
  }
  return response.json() as Promise<T>;
}

function post(body: unknown): RequestInit {
  return {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  };
}

/** Thin typed wrapper over the /api/v1 endpoints. Holds no state. */
export class ApiClient {
  private readonly base: string;

  constructor(baseUrl = "") {
    this.base = baseUrl.replace(/\/+$/, "");
  }

  private url(path: string): string {
    return `${this.base}/api/v1${path}`;
  }

  health(): Promise<HealthResponse> {
    return request(`${this.base}/healthz`);
  }

  startSession(question: string, educationLevel: string): Promise<SessionView> {
    return request(this.url("/sessions"), post({ question, education_level: educationLevel }));
  }

  getSession(sessionId: string): Promise<SessionView> {
    return request(this.url(`/sessions/${sessionId}`));
  }

  submitAssessment(sessionId: string, conceptId: string, known: boolean): Promise<AssessmentResponse> {
    return request(
      this.url(`/sessions/${sessionId}/assessments`),
      post({ concept_id: conceptId, known }),
    );
  }

  getGraph(sessionId: string): Promise<GraphDoc> {
    return request(this.url(`/sessions/${sessionId}/graph`));
  }

  getPath(sessionId: string): Promise<PathDoc> {
    return request(this.url(`/sessions/${sessionId}/path`));
  }

  generateExplanation(sessionId: string): Promise<ExplanationResponse> {
    return request(this.url(`/sessions/${sessionId}/explanation`), { method: "POST" });
  }
}
