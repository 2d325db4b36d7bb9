import { afterEach, describe, expect, it, vi } from "vitest";
import { ApiClient, ApiError } from "../src/api.js";
import { fixture, stubFetch } from "./helpers.js";

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("api client", () => {
  it("posts new sessions to the versioned endpoint", async () => {
    const calls = stubFetch([
      { method: "POST", path: "/api/v1/sessions", responses: [fixture("session_fresh")] },
    ]);
    const client = new ApiClient("http://api.example:8900/");
    await client.startSession("What is entropy?", "high_school");
    expect(calls[0].url).toBe("http://api.example:8900/api/v1/sessions");
    expect(calls[0].body).toEqual({
      question: "What is entropy?",
      education_level: "high_school",
    });
  });

  it("sends assessments with the concept id and verdict", async () => {
    const calls = stubFetch([
      { method: "POST", path: "/assessments", responses: [fixture("assess_0_forward_propagation")] },
    ]);
    await new ApiClient().submitAssessment("abc123", "forward propagation", false);
    expect(calls[0].url).toBe("/api/v1/sessions/abc123/assessments");
    expect(calls[0].body).toEqual({ concept_id: "forward propagation", known: false });
  });

  it("requests explanations without a body", async () => {
    const calls = stubFetch([
      { method: "POST", path: "/explanation", responses: [fixture("explanation")] },
    ]);
    await new ApiClient().generateExplanation("abc123");
    expect(calls[0].body).toBeNull();
  });

  it("unpacks structured error envelopes into ApiError", async () => {
    stubFetch([
      {
        method: "GET",
        path: "/api/v1/sessions/gone",
        responses: [{ detail: { message: "oracle unreachable", retryable: true } }],
        status: 502,
      },
    ]);
    const err = await new ApiClient().getSession("gone").catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(502);
    expect((err as ApiError).retryable).toBe(true);
    expect((err as ApiError).message).toBe("oracle unreachable");
  });

  it("handles plain string error details", async () => {
    stubFetch([
      {
        method: "GET",
        path: "/api/v1/sessions/gone",
        responses: [{ detail: "session 'gone' not found" }],
        status: 404,
      },
    ]);
    const err = await new ApiClient().getSession("gone").catch((e: unknown) => e);
    expect((err as ApiError).message).toBe("session 'gone' not found");
    expect((err as ApiError).retryable).toBeNull();
  });

  it("checks service health at the unversioned root", async () => {
    const calls = stubFetch([{ method: "GET", path: "/healthz", responses: [fixture("healthz")] }]);
    const health = await new ApiClient().health();
    expect(calls[0].url).toBe("/healthz");
    expect(health.status).toBe("ok");
    expect(health.oracle_mode).toBe("fixture");
  });
});
