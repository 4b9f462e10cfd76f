import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, type FetchLike } from "../src/api.js";

interface Recorded {
  url: string;
  method: string | undefined;
  headers: Record<string, string>;
  body: unknown;
}

function mockFetch(status: number, payload: unknown) {
  const calls: Recorded[] = [];
  const fetchImpl: FetchLike = async (url, init) => {
    calls.push({
      url,
      method: init?.method,
      headers: (init?.headers as Record<string, string>) ?? {},
      body: init?.body ? JSON.parse(String(init.body)) : undefined,
    });
    return {
      ok: status >= 200 && status < 300,
      status,
      statusText: String(status),
      json: async () => payload,
    } as Response;
  };
  return { calls, fetchImpl };
}

describe("ApiClient", () => {
  it("sends the bearer token on every request", async () => {
    const { calls, fetchImpl } = mockFetch(200, { id: "m1", title: "t", paragraphs: [] });
    const client = new ApiClient("http://api.test", "tok-alex", fetchImpl);
    await client.getMaterial("m1");
    expect(calls[0].url).toBe("http://api.test/materials/m1");
    expect(calls[0].headers.Authorization).toBe("Bearer tok-alex");
  });

  it("shapes the order request exactly", async () => {
    const { calls, fetchImpl } = mockFetch(200, { primary_post_id: "p", entries: [] });
    const client = new ApiClient("", "tok", fetchImpl);
    await client.order("m1", "m1-p0003");
    expect(calls[0].url).toBe("/pipelines/order");
    expect(calls[0].method).toBe("POST");
    expect(calls[0].body).toEqual({ material_id: "m1", post_id: "m1-p0003" });
  });

  it("shapes the evidence request with aspects and question", async () => {
    const { calls, fetchImpl } = mockFetch(200, {
      question: { text: "q", style: "similarity", word_count: 1, warnings: [] },
      style: "similarity",
      evidence: [],
    });
    const client = new ApiClient("", "tok", fetchImpl);
    const aspect = { keyword: "K", description: "D", source_span: "S" };
    await client.evidence("pA", "pB", "similarity", aspect, aspect, "the question");
    expect(calls[0].body).toEqual({
      post_a: "pA",
      post_b: "pB",
      style: "similarity",
      aspect_a: aspect,
      aspect_b: aspect,
      question: "the question",
    });
  });

  it("raises ApiError with the server envelope", async () => {
    const { fetchImpl } = mockFetch(409, {
      code: "gating_error",
      message: "Show Public requires 2 private posts; 1 more needed",
      detail: { missing: 1 },
    });
    const client = new ApiClient("", "tok", fetchImpl);
    await expect(client.showPublic("m1")).rejects.toSatisfy((error: unknown) => {
      expect(error).toBeInstanceOf(ApiError);
      const apiError = error as ApiError;
      expect(apiError.status).toBe(409);
      expect(apiError.envelope.code).toBe("gating_error");
      return true;
    });
  });

  it("wraps non-envelope failures", async () => {
    const { fetchImpl } = mockFetch(502, "gateway exploded");
    const client = new ApiClient("", "tok", fetchImpl);
    await expect(client.listPosts("m1")).rejects.toSatisfy((error: unknown) => {
      expect((error as ApiError).envelope.code).toBe("unknown_error");
      return true;
    });
  });
});
