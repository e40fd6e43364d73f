import { describe, expect, it } from "vitest";

import {
  escapeHtml,
  highlightSql,
  outcomeBadge,
  renderChatBubble,
  renderResultTable,
  renderSchemaTree,
  renderTraceSteps,
  renderTraceView,
  verdictBadge,
} from "../src/render.js";
import type { PipelineTrace, QueryResult, SchemaDoc } from "../src/types.js";

import answeredJson from "./fixtures/trace_answered.json";
import chatOnlyJson from "./fixtures/trace_chat_only.json";
import failedJson from "./fixtures/trace_failed.json";
import truncatedJson from "./fixtures/trace_truncated.json";

const answered = answeredJson as unknown as PipelineTrace;
const chatOnly = chatOnlyJson as unknown as PipelineTrace;
const failed = failedJson as unknown as PipelineTrace;
const truncated = truncatedJson as unknown as PipelineTrace;

function count(haystack: string, needle: string): number {
  return haystack.split(needle).length - 1;
}

describe("trace inspector", () => {
  it.each([
    ["answered", answered],
    ["chat-only", chatOnly],
    ["failed", failed],
    ["truncated", truncated],
  ])("renders one step per scratchpad entry (%s)", (_name, trace) => {
    const html = renderTraceView(trace);
    expect(count(html, 'class="trace-step"')).toBe(trace.scratchpad.length);
  });

  it("shows a green badge for an answered trace", () => {
    const html = renderTraceView(answered);
    expect(html).toContain('data-outcome="Answered"');
    expect(html).toContain("badge-green");
  });

  it("shows a red badge for a failed trace", () => {
    const html = renderTraceView(failed);
    expect(html).toContain('data-outcome="Failed"');
    expect(outcomeBadge(failed.outcome)).toContain("badge-red");
  });

  it("shows a blue badge and no SQL panel for a chat-only trace", () => {
    const html = renderTraceView(chatOnly);
    expect(html).toContain('data-outcome="ChatOnly"');
    expect(html).toContain("badge-blue");
    expect(html).not.toContain("SQL attempts");
    expect(html).not.toContain("sql-attempt");
  });

  it("shows both SQL drafts of the revision loop in order", () => {
    const html = renderTraceView(answered);
    expect(answered.sql_attempts.length).toBe(2);
    expect(count(html, 'class="sql-attempt"')).toBe(2);
    const firstDraft = html.indexOf("attempt 1");
    const secondDraft = html.indexOf("attempt 2");
    expect(firstDraft).toBeGreaterThan(-1);
    expect(secondDraft).toBeGreaterThan(firstDraft);
    expect(html).toContain('data-verdict="UnknownColumn"');
    expect(html).toContain('data-verdict="Ok"');
  });

  it("flags truncated results", () => {
    const html = renderTraceView(truncated);
    expect(html).toContain("truncation-badge");
    expect(html).toContain("truncated");
  });

  it("renders every agent role with a badge", () => {
    const html = renderTraceSteps(answered);
    expect(html).toContain("role-manager");
    expect(html).toContain("role-engineer");
    expect(html).toContain("role-quality");
    expect(html).toContain("role-analyst");
  });

  it("escapes hostile content everywhere", () => {
    const hostile: PipelineTrace = {
      ...chatOnly,
      question: "<script>alert(1)</script>",
      final_answer: "<img onerror=x>",
      scratchpad: [{
        seq: 1, agent_role: "project_manager", kind: "chat",
        content: "<b>bold</b>", instant: "2024-01-01T00:00:01+00:00",
      }],
    };
    const html = renderTraceView(hostile);
    expect(html).not.toContain("<script>");
    expect(html).not.toContain("<img");
    expect(html).not.toContain("<b>bold</b>");
  });
});

describe("result tables", () => {
  const result: QueryResult = {
    columns: ["route", "detector_count", "avg_speed"],
    rows: [["I-5", 4, 57.85], ["SR-99", 4, null]],
    row_count: 2,
    truncated: false,
    execution_log: "statement executed; rows fetched=2; truncated=false",
  };

  it("preserves column order exactly", () => {
    const html = renderResultTable(result);
    const route = html.indexOf("<th>route</th>");
    const detectors = html.indexOf("<th>detector_count</th>");
    const speed = html.indexOf("<th>avg_speed</th>");
    expect(route).toBeGreaterThan(-1);
    expect(detectors).toBeGreaterThan(route);
    expect(speed).toBeGreaterThan(detectors);
  });

  it("renders null cells as empty and keeps row count visible", () => {
    const html = renderResultTable(result);
    expect(html).toContain("2 rows");
    expect(html).toContain("<td></td>");
    expect(html).not.toContain("truncation-badge");
  });
});

describe("chat bubbles and sql highlighting", () => {
  it("renders the answer verbatim (escaped) in an assistant bubble", () => {
    const html = renderChatBubble(
      "assistant", "I-5 averages 57.9 mph right now.", "trace123");
    expect(html).toContain("I-5 averages 57.9 mph right now.");
    expect(html).toContain('data-trace-id="trace123"');
    expect(html).toContain("bubble-assistant");
  });

  it("highlights keywords without touching identifiers", () => {
    const html = highlightSql(
      "SELECT route FROM dbo.cabinets WHERE route = 'I-5'");
    expect(html).toContain('<span class="sql-kw">SELECT</span>');
    expect(html).toContain('<span class="sql-kw">WHERE</span>');
    expect(html).toContain("dbo.cabinets");
    expect(html).toContain('<span class="sql-str">&#39;I-5&#39;</span>');
  });

  it("verdict badges map advisory and blocking differently", () => {
    expect(verdictBadge("Ok")).toContain("badge-green");
    expect(verdictBadge("RowLimitRisk")).toContain("badge-amber");
    expect(verdictBadge("UnknownTable")).toContain("badge-red");
  });

  it("escapeHtml covers the critical characters", () => {
    expect(escapeHtml(`<a href="x">'&'</a>`)).toBe(
      "&lt;a href=&quot;x&quot;&gt;&#39;&amp;&#39;&lt;/a&gt;");
  });
});

describe("schema tree", () => {
  const schema: SchemaDoc = {
    tables: {
      "dbo.cabinets": [
        { name: "detector_id", type: "text" },
        { name: "milepost", type: "real" },
      ],
      "dbo.MinuteDataNW": [
        { name: "detector_id", type: "text" },
        { name: "speed", type: "real" },
      ],
    },
    minute_tables: ["dbo.MinuteDataNW"],
  };

  it("lists every table and marks minute-grained ones", () => {
    const html = renderSchemaTree(schema);
    expect(html).toContain("dbo.cabinets");
    expect(html).toContain("dbo.MinuteDataNW");
    expect(count(html, "minute-grained")).toBe(1);
    expect(html).toContain("<code>milepost</code>");
  });
});
