/** Thin typed client over the service HTTP/JSON API.
 *
 * Every number the UI displays comes through this client; nothing is
 * computed client-side.
 */

import type {
  BatchSummary,
  CandidatesPage,
  ErrorBody,
  PredictionsResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly detail: unknown = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseError(resp: Response): Promise<ApiError> {
  let body: Partial<ErrorBody> = {};
  try {
    body = (await resp.json()) as ErrorBody;
  } catch {
    // non-JSON error body; fall through to status text
  }
  return new ApiError(
    resp.status,
    body.code ?? "http_error",
    body.message ?? resp.statusText,
    body.detail ?? null,
  );
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.baseUrl + path, init);
    if (!resp.ok) {
      throw await parseError(resp);
    }
    return (await resp.json()) as T;
  }

  createBatch(
    documents: Array<{ id: string; text: string }>,
    categories: string[],
    config: Record<string, unknown> = {},
  ): Promise<{ batch_id: string; status: string }> {
    return this.request("/batches", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ documents, categories, config }),
    });
  }

  getBatch(batchId: string): Promise<BatchSummary> {
    return this.request(`/batches/${encodeURIComponent(batchId)}`);
  }

  getCandidates(batchId: string, page = 0): Promise<CandidatesPage> {
    return this.request(
      `/batches/${encodeURIComponent(batchId)}/candidates?page=${page}`,
    );
  }

  submitLabels(
    batchId: string,
    selections: Record<string, string[]>,
  ): Promise<BatchSummary> {
    return this.request(`/batches/${encodeURIComponent(batchId)}/labels`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ selections }),
    });
  }

  classify(batchId: string): Promise<BatchSummary> {
    return this.request(`/batches/${encodeURIComponent(batchId)}/classify`, {
      method: "POST",
    });
  }

  getPredictions(
    batchId: string,
    category?: string,
  ): Promise<PredictionsResponse> {
    const query = category ? `?category=${encodeURIComponent(category)}` : "";
    return this.request(
      `/batches/${encodeURIComponent(batchId)}/predictions${query}`,
    );
  }
}
