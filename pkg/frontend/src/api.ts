/** Thin client for the chatbot service JSON API.
 *
 * The fetch implementation is injectable so tests can stand up a mock
 * server; the UI derives all of its state from these responses.
 */

import type {
  MessageReply,
  PipelineTrace,
  SchemaDoc,
  SessionStatus,
  Transcript,
} from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function parseError(response: Response): Promise<never> {
  let detail = response.statusText || "request failed";
  try {
    const body = await response.json();
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body: keep the status text
  }
  throw new ApiError(response.status, detail);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  async createSession(): Promise<string> {
    const body = await this.request<{ session_id: string }>("/sessions", {
      method: "POST",
    });
    return body.session_id;
  }

  sendMessage(sessionId: string, question: string): Promise<MessageReply> {
    return this.request<MessageReply>(
      `/sessions/${encodeURIComponent(sessionId)}/messages`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ question }),
      },
    );
  }

  getTranscript(sessionId: string): Promise<Transcript> {
    return this.request<Transcript>(
      `/sessions/${encodeURIComponent(sessionId)}`,
    );
  }

  getStatus(sessionId: string): Promise<SessionStatus> {
    return this.request<SessionStatus>(
      `/sessions/${encodeURIComponent(sessionId)}/status`,
    );
  }

  getTrace(traceId: string): Promise<PipelineTrace> {
    return this.request<PipelineTrace>(
      `/traces/${encodeURIComponent(traceId)}`,
    );
  }

  getSchema(): Promise<SchemaDoc> {
    return this.request<SchemaDoc>("/schema");
  }
}
