/** Typed client for the discussion service API.
 *
 * The client is a pure passthrough: no visibility logic, no retries, no
 * response reshaping. Errors surface as ApiError carrying the server's
 * stable {code, message, detail} envelope.
 */

import type {
  ArtifactJson,
  AspectSetJson,
  ErrorEnvelope,
  MaterialJson,
  OrderingJson,
  PairJson,
  PostJson,
  QuestionJson,
  ReportJson,
  StateJson,
  Style,
  SummaryJson,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly envelope: ErrorEnvelope,
  ) {
    super(envelope.message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export interface AspectInput {
  keyword: string;
  description: string;
  source_span: string;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private token: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  setToken(token: string): void {
    this.token = token;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: {
        Authorization: `Bearer ${this.token}`,
        ...(body === undefined ? {} : { "Content-Type": "application/json" }),
      },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      const envelope: ErrorEnvelope =
        payload && typeof payload.code === "string"
          ? payload
          : { code: "unknown_error", message: response.statusText, detail: payload };
      throw new ApiError(response.status, envelope);
    }
    return payload as T;
  }

  getMaterial(materialId: string): Promise<MaterialJson> {
    return this.request("GET", `/materials/${materialId}`);
  }

  listPosts(materialId: string): Promise<PostJson[]> {
    return this.request("GET", `/posts?material=${encodeURIComponent(materialId)}`);
  }

  getState(materialId: string): Promise<StateJson> {
    return this.request("GET", `/state/${materialId}`);
  }

  showPublic(materialId: string): Promise<StateJson> {
    return this.request("POST", `/state/${materialId}/show-public`);
  }

  createPost(
    materialId: string,
    anchorParagraph: number,
    content: string,
    highlightRange?: [number, number],
  ): Promise<PostJson> {
    return this.request("POST", "/posts", {
      material_id: materialId,
      anchor_paragraph: anchorParagraph,
      content,
      highlight_range: highlightRange ?? null,
    });
  }

  reply(postId: string, content: string): Promise<PostJson> {
    return this.request("POST", `/posts/${postId}/reply`, { content });
  }

  mergePosts(postIds: string[]): Promise<PostJson> {
    return this.request("POST", "/posts/merge", { post_ids: postIds });
  }

  order(materialId: string, postId: string): Promise<OrderingJson> {
    return this.request("POST", "/pipelines/order", {
      material_id: materialId,
      post_id: postId,
    });
  }

  summarize(postId: string, includeReplies = false, regenerate = false): Promise<SummaryJson> {
    return this.request("POST", "/pipelines/summary", {
      post_id: postId,
      include_replies: includeReplies,
      regenerate,
    });
  }

  pairAnalysis(postA: string, postB: string): Promise<PairJson> {
    return this.request("POST", "/pipelines/pair", { post_a: postA, post_b: postB });
  }

  aspects(postA: string, postB: string): Promise<{ aspects_a: AspectSetJson; aspects_b: AspectSetJson }> {
    return this.request("POST", "/pipelines/aspects", { post_a: postA, post_b: postB });
  }

  question(
    postA: string,
    postB: string,
    style: Style,
    aspectA: AspectInput,
    aspectB: AspectInput,
  ): Promise<QuestionJson> {
    return this.request("POST", "/pipelines/question", {
      post_a: postA,
      post_b: postB,
      style,
      aspect_a: aspectA,
      aspect_b: aspectB,
    });
  }

  evidence(
    postA: string,
    postB: string,
    style: Style,
    aspectA: AspectInput,
    aspectB: AspectInput,
    questionText: string,
  ): Promise<ArtifactJson> {
    return this.request("POST", "/pipelines/evidence", {
      post_a: postA,
      post_b: postB,
      style,
      aspect_a: aspectA,
      aspect_b: aspectB,
      question: questionText,
    });
  }

  report(materialId: string): Promise<ReportJson> {
    return this.request("GET", `/report?material=${encodeURIComponent(materialId)}`);
  }
}
