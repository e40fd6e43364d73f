/** Wire types mirroring the chatbot service's JSON exactly. */

export type Outcome = "Answered" | "ChatOnly" | "Failed";

export type Verdict =
  | "Ok"
  | "SyntaxError"
  | "ForbiddenStatement"
  | "UnknownTable"
  | "UnknownColumn"
  | "RowLimitRisk";

export interface ScratchpadEntry {
  seq: number;
  agent_role: string;
  kind: string;
  content: string;
  instant: string;
}

export interface Diagnostic {
  code: string;
  message: string;
  span: [number, number];
}

export interface ValidationReport {
  verdict: Verdict;
  diagnostics: Diagnostic[];
}

export interface QueryResult {
  columns: string[];
  rows: unknown[][];
  row_count: number;
  truncated: boolean;
  execution_log: string;
}

export interface SqlAttempt {
  sql: string;
  report: ValidationReport;
  result: QueryResult | null;
}

export interface FeatureFlags {
  prompt_on: boolean;
  fewshot_on: boolean;
  multiagent_on: boolean;
}

export interface PipelineTrace {
  question: string;
  outcome: Outcome;
  final_answer: string;
  iterations_used: number;
  feature_flags: FeatureFlags;
  scratchpad: ScratchpadEntry[];
  sql_attempts: SqlAttempt[];
}

export interface MessageReply {
  answer: string;
  trace_id: string;
  outcome: Outcome;
}

export interface TranscriptTurn {
  turn_id: number;
  speaker: "user" | "assistant";
  text: string;
  instant: string;
}

export interface Transcript {
  session_id: string;
  created_at: string;
  turns: TranscriptTurn[];
}

export interface SchemaColumn {
  name: string;
  type: string;
}

export interface SchemaDoc {
  tables: Record<string, SchemaColumn[]>;
  minute_tables: string[];
}

export interface SessionStatus {
  in_flight: boolean;
  last_trace_id: string | null;
}
