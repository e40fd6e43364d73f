/** DOM-free interaction state machine between the API client and the view.
 *
 * Enforces one in-flight question per session on the client side (the
 * server answers 409 if the guard is ever bypassed) and surfaces API
 * faults as banner events instead of exceptions.
 */

import { ApiClient, ApiError } from "./api.js";
import type { MessageReply, PipelineTrace } from "./types.js";

export interface ViewEvents {
  onBusyChange(busy: boolean): void;
  onUserMessage(text: string): void;
  onAssistantMessage(reply: MessageReply): void;
  onBanner(kind: "error" | "warn", text: string): void;
  onTraceLoaded(trace: PipelineTrace): void;
  onSessionsChanged(sessionIds: string[], active: string | null): void;
}

export class ChatController {
  private sessions: string[] = [];
  private active: string | null = null;
  private busy = false;

  constructor(
    private readonly api: ApiClient,
    private readonly events: ViewEvents,
  ) {}

  get activeSession(): string | null {
    return this.active;
  }

  get inFlight(): boolean {
    return this.busy;
  }

  async newSession(): Promise<string> {
    const sessionId = await this.api.createSession();
    this.sessions.push(sessionId);
    this.active = sessionId;
    this.events.onSessionsChanged([...this.sessions], this.active);
    return sessionId;
  }

  selectSession(sessionId: string): void {
    if (this.sessions.includes(sessionId)) {
      this.active = sessionId;
      this.events.onSessionsChanged([...this.sessions], this.active);
    }
  }

  /** Returns true when the question was sent and answered. */
  async send(question: string): Promise<boolean> {
    if (!question.trim()) return false;
    if (!this.active) {
      this.events.onBanner("error", "create a session first");
      return false;
    }
    if (this.busy) {
      this.events.onBanner("warn", "a question is already in flight");
      return false;
    }
    this.busy = true;
    this.events.onBusyChange(true);
    this.events.onUserMessage(question);
    try {
      const reply = await this.api.sendMessage(this.active, question);
      this.events.onAssistantMessage(reply);
      return true;
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.events.onBanner("warn", error.detail);
      } else if (error instanceof ApiError && error.status === 503) {
        this.events.onBanner("error", `provider unavailable: ${error.detail}`);
      } else if (error instanceof ApiError) {
        this.events.onBanner("error", error.detail);
      } else {
        this.events.onBanner("error", String(error));
      }
      return false;
    } finally {
      this.busy = false;
      this.events.onBusyChange(false);
    }
  }

  async openTrace(traceId: string): Promise<void> {
    try {
      this.events.onTraceLoaded(await this.api.getTrace(traceId));
    } catch (error) {
      const detail = error instanceof ApiError ? error.detail : String(error);
      this.events.onBanner("error", `trace not found: ${detail}`);
    }
  }
}
