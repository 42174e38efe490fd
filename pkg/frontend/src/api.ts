/**
 * Thin client for the session service. All physics lives server-side; this
 * module only moves JSON. The fetch implementation is injectable so tests
 * can intercept every byte of traffic.
 */

import type {
  Basis,
  CreateSessionResponse,
  DiagramDoc,
  MeasureResponse,
  OutcomeChoice,
  SessionView,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private base: string = "",
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.base + path, init);
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, payload.code ?? "error", payload.message ?? "request failed");
    }
    return payload as T;
  }

  createSession(n: number, seed?: number, hybrid = false): Promise<CreateSessionResponse> {
    return this.request("POST", "/sessions", { n, seed: seed ?? null, hybrid });
  }

  getSession(id: string): Promise<SessionView> {
    return this.request("GET", `/sessions/${id}`);
  }

  /** Dry run: predicted summaries for both outcomes, no mutation. */
  whatIf(id: string, qubit: number, basis: Basis): Promise<MeasureResponse> {
    return this.request("POST", `/sessions/${id}/measure`, {
      qubit,
      basis,
      dry_run: true,
    });
  }

  measure(id: string, qubit: number, basis: Basis, outcome: OutcomeChoice): Promise<MeasureResponse> {
    return this.request("POST", `/sessions/${id}/measure`, {
      qubit,
      basis,
      outcome,
      dry_run: false,
    });
  }

  undo(id: string): Promise<SessionView> {
    return this.request("POST", `/sessions/${id}/undo`);
  }

  getDiagram(id: string): Promise<DiagramDoc> {
    return this.request("GET", `/sessions/${id}/diagram`);
  }

  deleteSession(id: string): Promise<{ deleted: string }> {
    return this.request("DELETE", `/sessions/${id}`);
  }
}
