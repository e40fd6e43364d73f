import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ChatController, ViewEvents } from "../src/controller.js";
import type { PipelineTrace } from "../src/types.js";

import answeredJson from "./fixtures/trace_answered.json";

const answeredTrace = answeredJson as unknown as PipelineTrace;

const FIXTURE_ANSWER =
  "Right now I-5 northbound is moving at free-flow speed, around 60 mph " +
  "on average across its detectors.";

/** Minimal mock of the service API over the fetch contract. */
function mockServer() {
  const state = {
    posts: 0,
    busySessions: new Set<string>(),
    failWith: 0,
    holdReplies: [] as Array<() => void>,
    holding: false,
  };

  const json = (status: number, body: unknown) =>
    new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });

  const fetchFn = async (url: string, init?: RequestInit): Promise<Response> => {
    if (url.endsWith("/sessions") && init?.method === "POST") {
      return json(201, { session_id: "sess-1" });
    }
    const message = url.match(/\/sessions\/([^/]+)\/messages$/);
    if (message && init?.method === "POST") {
      state.posts += 1;
      if (state.failWith) return json(state.failWith, { detail: "nope" });
      if (state.busySessions.has(message[1])) {
        return json(409, { detail: "a question is already in flight" });
      }
      if (state.holding) {
        await new Promise<void>((resolve) => state.holdReplies.push(resolve));
      }
      return json(200, {
        answer: FIXTURE_ANSWER,
        trace_id: "trace-1",
        outcome: "Answered",
      });
    }
    if (url.endsWith("/traces/trace-1")) return json(200, answeredTrace);
    if (url.includes("/traces/")) return json(404, { detail: "unknown trace" });
    return json(404, { detail: "unknown route" });
  };

  return { state, fetchFn };
}

interface Recorded {
  busy: boolean[];
  users: string[];
  answers: string[];
  banners: Array<[string, string]>;
  traces: PipelineTrace[];
  sessions: string[][];
}

function recordingEvents(): { events: ViewEvents; seen: Recorded } {
  const seen: Recorded = {
    busy: [], users: [], answers: [], banners: [], traces: [], sessions: [],
  };
  const events: ViewEvents = {
    onBusyChange: (b) => seen.busy.push(b),
    onUserMessage: (t) => seen.users.push(t),
    onAssistantMessage: (r) => seen.answers.push(r.answer),
    onBanner: (kind, text) => seen.banners.push([kind, text]),
    onTraceLoaded: (trace) => seen.traces.push(trace),
    onSessionsChanged: (ids) => seen.sessions.push(ids),
  };
  return { events, seen };
}

describe("chat round trip against the mocked server", () => {
  let server: ReturnType<typeof mockServer>;
  let controller: ChatController;
  let seen: Recorded;

  beforeEach(() => {
    server = mockServer();
    const recorded = recordingEvents();
    seen = recorded.seen;
    controller = new ChatController(
      new ApiClient("http://api.test", server.fetchFn), recorded.events);
  });

  it("renders the fixture answer after a send", async () => {
    await controller.newSession();
    const ok = await controller.send("How fast is I-5 right now?");
    expect(ok).toBe(true);
    expect(seen.users).toEqual(["How fast is I-5 right now?"]);
    expect(seen.answers).toEqual([FIXTURE_ANSWER]);
    expect(seen.busy).toEqual([true, false]);
    expect(seen.banners).toEqual([]);
  });

  it("disables input while a question is in flight", async () => {
    await controller.newSession();
    server.state.holding = true;
    const first = controller.send("first question");
    await Promise.resolve();
    expect(controller.inFlight).toBe(true);
    const second = await controller.send("second question");
    expect(second).toBe(false);
    expect(seen.banners).toEqual(
      [["warn", "a question is already in flight"]]);
    expect(server.state.posts).toBe(1);
    server.state.holdReplies.forEach((release) => release());
    expect(await first).toBe(true);
    expect(controller.inFlight).toBe(false);
  });

  it("surfaces a server-side 409 as a warning banner", async () => {
    await controller.newSession();
    server.state.busySessions.add("sess-1");
    const ok = await controller.send("q");
    expect(ok).toBe(false);
    expect(seen.banners[0][0]).toBe("warn");
    expect(seen.banners[0][1]).toContain("in flight");
  });

  it("surfaces 503 as an error banner", async () => {
    await controller.newSession();
    server.state.failWith = 503;
    const ok = await controller.send("q");
    expect(ok).toBe(false);
    expect(seen.banners[0][0]).toBe("error");
    expect(seen.banners[0][1]).toContain("provider unavailable");
  });

  it("refuses to send without a session", async () => {
    const ok = await controller.send("q");
    expect(ok).toBe(false);
    expect(seen.banners[0][1]).toContain("session");
    expect(server.state.posts).toBe(0);
  });

  it("ignores blank questions", async () => {
    await controller.newSession();
    expect(await controller.send("   ")).toBe(false);
    expect(server.state.posts).toBe(0);
  });
});

describe("trace inspector data flow", () => {
  it("loads the fixture trace with its full step list", async () => {
    const server = mockServer();
    const { events, seen } = recordingEvents();
    const controller = new ChatController(
      new ApiClient("http://api.test", server.fetchFn), events);
    await controller.openTrace("trace-1");
    expect(seen.traces).toHaveLength(1);
    expect(seen.traces[0].scratchpad).toHaveLength(
      answeredTrace.scratchpad.length);
    expect(seen.traces[0].outcome).toBe("Answered");
  });

  it("maps an unknown trace to a banner, not an exception", async () => {
    const server = mockServer();
    const { events, seen } = recordingEvents();
    const controller = new ChatController(
      new ApiClient("http://api.test", server.fetchFn), events);
    await controller.openTrace("missing");
    expect(seen.traces).toHaveLength(0);
    expect(seen.banners[0][0]).toBe("error");
    expect(seen.banners[0][1]).toContain("unknown trace");
  });
});

describe("session management", () => {
  it("tracks created sessions and the active one", async () => {
    const server = mockServer();
    const { events, seen } = recordingEvents();
    const controller = new ChatController(
      new ApiClient("http://api.test", server.fetchFn), events);
    const id = await controller.newSession();
    expect(id).toBe("sess-1");
    expect(controller.activeSession).toBe("sess-1");
    expect(seen.sessions).toEqual([["sess-1"]]);
  });
});
