import type {
  Choice,
  CloseResponse,
  CreateOptions,
  CreateResponse,
  RevealView,
  StatsDoc,
  TrialView,
  WaitingView,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over the session endpoints. One request per call. */
export class SessionApi {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    const payload = await response.json().catch(() => ({}));
    if (!response.ok) {
      const doc = payload as { code?: string; message?: string };
      throw new ApiError(response.status, doc.code ?? "error", doc.message ?? response.statusText);
    }
    return payload as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("GET", "/health");
  }

  createSession(options: CreateOptions): Promise<CreateResponse> {
    return this.request("POST", "/sessions", options);
  }

  getTrial(sessionId: string, token?: string): Promise<TrialView> {
    return this.request("GET", `/sessions/${sessionId}/trial${tokenQuery(token)}`);
  }

  submitChoice(sessionId: string, choice: Choice, token?: string): Promise<RevealView | WaitingView> {
    const body = token === undefined ? choice : { ...choice, token };
    return this.request("POST", `/sessions/${sessionId}/choice`, body);
  }

  advance(sessionId: string, token?: string): Promise<TrialView> {
    return this.request("POST", `/sessions/${sessionId}/advance${tokenQuery(token)}`);
  }

  getStats(sessionId: string): Promise<StatsDoc> {
    return this.request("GET", `/sessions/${sessionId}/stats`);
  }

  closeSession(sessionId: string): Promise<CloseResponse> {
    return this.request("DELETE", `/sessions/${sessionId}`);
  }
}

function tokenQuery(token?: string): string {
  return token === undefined ? "" : `?token=${encodeURIComponent(token)}`;
}
