// Typed client for the session API. The fetch implementation is injectable
// so tests can run against an in-process fixture service.

import type {
  CurrentDto,
  ErrorDetail,
  StartSessionDto,
  SubmitBody,
  SubmitResponseDto,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: ErrorDetail,
  ) {
    super(detail.error || `HTTP ${status}`);
  }
}

export class NetworkError extends Error {
  constructor(cause: unknown) {
    super(`service unreachable: ${cause instanceof Error ? cause.message : String(cause)}`);
  }
}

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => globalThis.fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`, {
        method,
        headers: { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (cause) {
      throw new NetworkError(cause);
    }
    if (!response.ok) {
      let detail: ErrorDetail = { error: `HTTP ${response.status}` };
      try {
        const payload = await response.json();
        if (payload && typeof payload === "object" && "detail" in payload) {
          detail = typeof payload.detail === "string" ? { error: payload.detail } : payload.detail;
        }
      } catch {
        // non-json error body; keep the status line
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  startSession(campaignId: string, assessorId: string): Promise<StartSessionDto> {
    return this.request("POST", `/campaigns/${encodeURIComponent(campaignId)}/sessions`, {
      assessor_id: assessorId,
    });
  }

  getCurrent(token: string): Promise<CurrentDto> {
    return this.request("GET", `/sessions/${encodeURIComponent(token)}/current`);
  }

  submit(token: string, body: SubmitBody): Promise<SubmitResponseDto> {
    return this.request("POST", `/sessions/${encodeURIComponent(token)}/submit`, body);
  }
}
