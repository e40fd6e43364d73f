/** Pure HTML renderers for the chat view and the trace inspector.
 *
 * Everything here is a string-in/string-out function of API data so the
 * views can be tested without a browser; app.ts only assigns the output
 * to innerHTML.
 */

import type {
  Outcome,
  PipelineTrace,
  QueryResult,
  SchemaDoc,
  SqlAttempt,
  Verdict,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

const SQL_KEYWORDS = new Set([
  "select", "from", "where", "join", "inner", "left", "right", "outer", "on",
  "group", "by", "having", "order", "limit", "offset", "as", "and", "or",
  "not", "in", "is", "null", "like", "between", "distinct", "case", "when",
  "then", "else", "end", "cast", "exists", "asc", "desc", "top", "union",
]);

/** Token-level keyword highlighting; everything passes through escaping. */
export function highlightSql(sql: string): string {
  return sql
    .split(/(\s+|,|\(|\))/g)
    .map((token) => {
      if (SQL_KEYWORDS.has(token.toLowerCase())) {
        return `<span class="sql-kw">${escapeHtml(token)}</span>`;
      }
      if (/^'.*'$/.test(token)) {
        return `<span class="sql-str">${escapeHtml(token)}</span>`;
      }
      return escapeHtml(token);
    })
    .join("");
}

const OUTCOME_CLASS: Record<Outcome, string> = {
  Answered: "badge-green",
  ChatOnly: "badge-blue",
  Failed: "badge-red",
};

export function outcomeBadge(outcome: Outcome): string {
  const cls = OUTCOME_CLASS[outcome] ?? "badge-red";
  return `<span class="badge ${cls}" data-outcome="${outcome}">${outcome}</span>`;
}

export function verdictBadge(verdict: Verdict): string {
  const cls =
    verdict === "Ok" ? "badge-green"
    : verdict === "RowLimitRisk" ? "badge-amber"
    : "badge-red";
  return `<span class="badge ${cls}" data-verdict="${verdict}">${verdict}</span>`;
}

const ROLE_CLASS: Record<string, string> = {
  project_manager: "role-manager",
  sql_engineer: "role-engineer",
  quality_analyst: "role-quality",
  data_analyst: "role-analyst",
};

export function roleBadge(role: string): string {
  const cls = ROLE_CLASS[role] ?? "role-other";
  const label = role.replace(/_/g, " ");
  return `<span class="badge role-badge ${cls}">${escapeHtml(label)}</span>`;
}

export function renderChatBubble(speaker: "user" | "assistant", text: string,
                                 traceId?: string): string {
  const traceLink = traceId
    ? ` <a href="#" class="trace-link" data-trace-id="${escapeHtml(traceId)}">trace</a>`
    : "";
  return (
    `<div class="bubble bubble-${speaker}">` +
    `<div class="bubble-text">${escapeHtml(text)}</div>${traceLink}</div>`
  );
}

export function renderBanner(kind: "error" | "warn", text: string): string {
  return `<div class="banner banner-${kind}">${escapeHtml(text)}</div>`;
}

/** Column order is preserved exactly as the API reported it. */
export function renderResultTable(result: QueryResult): string {
  const header = result.columns
    .map((c) => `<th>${escapeHtml(c)}</th>`)
    .join("");
  const body = result.rows
    .map((row) =>
      `<tr>${row.map((v) => `<td>${escapeHtml(String(v ?? ""))}</td>`).join("")}</tr>`)
    .join("");
  const truncation = result.truncated
    ? `<span class="badge badge-amber truncation-badge">truncated</span>`
    : "";
  return (
    `<div class="result-block">` +
    `<div class="result-meta">${result.row_count} rows ${truncation}</div>` +
    `<table class="result-table"><thead><tr>${header}</tr></thead>` +
    `<tbody>${body}</tbody></table></div>`
  );
}

export function renderSqlAttempt(attempt: SqlAttempt, index: number): string {
  const diagnostics = attempt.report.diagnostics
    .map((d) => `<li><code>${escapeHtml(d.code)}</code> ${escapeHtml(d.message)}</li>`)
    .join("");
  const diagnosticsBlock = diagnostics
    ? `<ul class="diagnostics">${diagnostics}</ul>`
    : "";
  const resultBlock = attempt.result
    ? renderResultTable(attempt.result) +
      `<pre class="execution-log">${escapeHtml(attempt.result.execution_log)}</pre>`
    : "";
  return (
    `<div class="sql-attempt">` +
    `<div class="attempt-head">attempt ${index + 1} ` +
    `${verdictBadge(attempt.report.verdict)}</div>` +
    `<pre class="sql">${highlightSql(attempt.sql)}</pre>` +
    diagnosticsBlock + resultBlock + `</div>`
  );
}

/** One rendered step per scratchpad entry -- counts always line up. */
export function renderTraceSteps(trace: PipelineTrace): string {
  return trace.scratchpad
    .map((entry) =>
      `<div class="trace-step" data-kind="${escapeHtml(entry.kind)}">` +
      `<div class="step-head">#${entry.seq} ${roleBadge(entry.agent_role)} ` +
      `<span class="step-kind">${escapeHtml(entry.kind)}</span></div>` +
      `<pre class="step-content">${escapeHtml(entry.content)}</pre></div>`)
    .join("");
}

export function renderTraceView(trace: PipelineTrace): string {
  const attempts = trace.sql_attempts.length
    ? `<h3>SQL attempts</h3><div class="sql-panel">` +
      trace.sql_attempts.map(renderSqlAttempt).join("") + `</div>`
    : "";
  const flags = trace.feature_flags;
  const flagsLine =
    `prompt=${flags.prompt_on ? "on" : "off"} ` +
    `fewshot=${flags.fewshot_on ? "on" : "off"} ` +
    `multiagent=${flags.multiagent_on ? "on" : "off"}`;
  return (
    `<div class="trace-view">` +
    `<div class="trace-head">${outcomeBadge(trace.outcome)} ` +
    `<span class="trace-question">${escapeHtml(trace.question)}</span></div>` +
    `<div class="trace-meta">iterations: ${trace.iterations_used} &middot; ` +
    `${flagsLine}</div>` +
    `<h3>Agent steps</h3>${renderTraceSteps(trace)}` +
    attempts +
    `<h3>Final answer</h3>` +
    `<div class="final-answer">${escapeHtml(trace.final_answer)}</div></div>`
  );
}

export function renderSchemaTree(schema: SchemaDoc): string {
  const minute = new Set(schema.minute_tables);
  const tables = Object.entries(schema.tables)
    .map(([name, columns]) => {
      const badge = minute.has(name)
        ? ` <span class="badge badge-amber">minute-grained</span>`
        : "";
      const cols = columns
        .map((c) =>
          `<li><code>${escapeHtml(c.name)}</code> ` +
          `<span class="col-type">${escapeHtml(c.type)}</span></li>`)
        .join("");
      return (
        `<details class="schema-table"><summary>${escapeHtml(name)}${badge}` +
        `</summary><ul>${cols}</ul></details>`
      );
    })
    .join("");
  return `<div class="schema-tree">${tables}</div>`;
}

export function renderSessionList(sessionIds: string[], active: string | null): string {
  return sessionIds
    .map((id) => {
      const cls = id === active ? "session-item active" : "session-item";
      const short = id.length > 12 ? `${id.slice(0, 12)}…` : id;
      return `<li class="${cls}" data-session-id="${escapeHtml(id)}">` +
        `${escapeHtml(short)}</li>`;
    })
    .join("");
}
