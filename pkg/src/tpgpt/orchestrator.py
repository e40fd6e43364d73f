"""The question-answering state machine.

A question travels PLAN -> (CHAT | [GENERATE_SQL -> VALIDATE -> EXECUTE ->
INSPECT]* -> INTERPRET) -> DONE.  Four agent roles share an append-only
scratchpad: the project manager plans (or answers chat directly), the SQL
engineer drafts queries, the quality analyst turns validation diagnostics
and execution logs into revision advice, and the data analyst writes the
final answer from the queried rows.  The revision loop is bounded by
``max_iterations`` and by a hard cap on provider calls, so a stuck run
always terminates with a Failed trace rather than spinning.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, List, Optional, Sequence, Tuple

from .fewshot import ExampleRepository, FewShotExample
from .gateway import ExecutionError, QueryResult, TrafficStore
from .llm import ChatMessage, ChatRequest, ProviderError
from .memory import ChatSession, MemoryStore
from .prompts import AgentRole, RenderedPrompt, TemplateSet, render, render_minimal
from .sqlguard import ValidationReport, validate_sql

FAILURE_ANSWER = ("I could not produce a working query for this question "
                  "within the revision budget.")
_REASK_TEXT = ("Your previous reply was not a single JSON object with the "
               "fields thought, action and action_input. Reply again with "
               "exactly that JSON object and nothing else.")
_RESULT_PREVIEW_ROWS = 20
_ENTRY_CONTENT_CAP = 2000

_trace_observers: List[Callable[["PipelineTrace"], None]] = []


def register_trace_observer(observer: Callable[["PipelineTrace"], None]) -> None:
    _trace_observers.append(observer)


def unregister_trace_observer(observer: Callable[["PipelineTrace"], None]) -> None:
    if observer in _trace_observers:
        _trace_observers.remove(observer)


class EntryKind(str, enum.Enum):
    PLAN = "plan"
    SQL_DRAFT = "sql_draft"
    VALIDATION = "validation"
    EXECUTION = "execution"
    INSPECTION = "inspection"
    INTERPRETATION = "interpretation"
    CHAT = "chat"


class Outcome(str, enum.Enum):
    ANSWERED = "Answered"
    CHAT_ONLY = "ChatOnly"
    FAILED = "Failed"


@dataclass(frozen=True)
class ScratchpadEntry:
    seq: int
    agent_role: AgentRole
    kind: EntryKind
    content: str
    instant: datetime


class Scratchpad:
    """Append-only, strictly ordered shared log; entries are never mutated."""

    def __init__(self) -> None:
        self._entries: List[ScratchpadEntry] = []

    @property
    def entries(self) -> Tuple[ScratchpadEntry, ...]:
        return tuple(self._entries)

    def append(self, agent_role: AgentRole, kind: EntryKind, content: str,
               instant: datetime) -> ScratchpadEntry:
        entry = ScratchpadEntry(
            seq=len(self._entries) + 1,
            agent_role=agent_role,
            kind=kind,
            content=content[:_ENTRY_CONTENT_CAP],
            instant=instant,
        )
        self._entries.append(entry)
        return entry

    def digest(self) -> str:
        """Deterministic text rendering for prompts (instants excluded)."""
        return "\n".join(
            f"#{e.seq} [{e.agent_role.value}/{e.kind.value}] {e.content}"
            for e in self._entries)


@dataclass(frozen=True)
class FeatureFlags:
    prompt_on: bool = True
    fewshot_on: bool = True
    multiagent_on: bool = True


@dataclass
class SqlAttempt:
    sql: str
    report: ValidationReport
    result: Optional[QueryResult] = None


@dataclass(frozen=True)
class OrchestratorConfig:
    max_iterations: int = 5
    fewshot_k: int = 3
    memory_m: int = 2
    flags: FeatureFlags = field(default_factory=FeatureFlags)
    max_rows: int = 1000
    timeout_s: float = 10.0
    clock: Optional[Callable[[], datetime]] = None

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")

    @property
    def max_provider_calls(self) -> int:
        # plan + interpret + up to three calls per revision iteration.
        return 2 + 3 * self.max_iterations


@dataclass
class PipelineTrace:
    question: str
    scratchpad: Scratchpad
    sql_attempts: List[SqlAttempt]
    final_answer: str
    outcome: Outcome
    iterations_used: int
    feature_flags: FeatureFlags

    def to_dict(self) -> dict:
        return {
            "question": self.question,
            "outcome": self.outcome.value,
            "final_answer": self.final_answer,
            "iterations_used": self.iterations_used,
            "feature_flags": {
                "prompt_on": self.feature_flags.prompt_on,
                "fewshot_on": self.feature_flags.fewshot_on,
                "multiagent_on": self.feature_flags.multiagent_on,
            },
            "scratchpad": [
                {
                    "seq": e.seq,
                    "agent_role": e.agent_role.value,
                    "kind": e.kind.value,
                    "content": e.content,
                    "instant": e.instant.isoformat(),
                }
                for e in self.scratchpad.entries
            ],
            "sql_attempts": [
                {
                    "sql": a.sql,
                    "report": a.report.to_dict(),
                    "result": a.result.to_dict() if a.result else None,
                }
                for a in self.sql_attempts
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, doc: dict) -> "PipelineTrace":
        pad = Scratchpad()
        for e in doc["scratchpad"]:
            pad.append(AgentRole(e["agent_role"]), EntryKind(e["kind"]),
                       e["content"], datetime.fromisoformat(e["instant"]))
        attempts = [
            SqlAttempt(
                sql=a["sql"],
                report=ValidationReport.from_dict(a["report"]),
                result=QueryResult.from_dict(a["result"]) if a["result"] else None,
            )
            for a in doc["sql_attempts"]
        ]
        flags = FeatureFlags(**doc["feature_flags"])
        return cls(
            question=doc["question"],
            scratchpad=pad,
            sql_attempts=attempts,
            final_answer=doc["final_answer"],
            outcome=Outcome(doc["outcome"]),
            iterations_used=doc["iterations_used"],
            feature_flags=flags,
        )

    @classmethod
    def from_json(cls, text: str) -> "PipelineTrace":
        return cls.from_dict(json.loads(text))

    def executed_results(self) -> List[QueryResult]:
        return [a.result for a in self.sql_attempts if a.result is not None]

    def final_result(self) -> Optional[QueryResult]:
        results = self.executed_results()
        return results[-1] if results else None

    def state_sequence(self) -> List[str]:
        return [e.kind.value for e in self.scratchpad.entries]


class ReplyFormatError(ValueError):
    """Agent reply did not satisfy the JSON contract after one re-ask."""


def parse_agent_reply(content: str) -> dict:
    """Extract the {thought, action, action_input} object from a reply."""
    text = content.strip()
    if text.startswith("```"):
        text = text.strip("`")
        if text.startswith("json"):
            text = text[4:]
        text = text.strip()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReplyFormatError(f"reply is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ReplyFormatError("reply JSON must be an object")
    for key in ("thought", "action", "action_input"):
        if key not in doc:
            raise ReplyFormatError(f"reply JSON lacks field {key!r}")
    return doc


class _BudgetExceeded(Exception):
    pass


class _StepFailed(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def render_result_preview(result: QueryResult) -> str:
    """Bounded, deterministic rendering of a result for the scratchpad."""
    lines = [result.execution_log]
    if result.columns:
        lines.append("columns: " + ", ".join(result.columns))
    for row in result.rows[:_RESULT_PREVIEW_ROWS]:
        lines.append("row: " + ", ".join(repr(v) for v in row))
    hidden = result.row_count - min(result.row_count, _RESULT_PREVIEW_ROWS)
    if hidden > 0:
        lines.append(f"(... {hidden} more rows not shown)")
    if result.truncated:
        lines.append("(result was truncated at the row cap)")
    return "\n".join(lines)


class Orchestrator:
    """Wires the store, providers, templates, examples and memory together."""

    def __init__(self, store: TrafficStore, provider, embedder,
                 templates: TemplateSet, repository: ExampleRepository,
                 memory: MemoryStore):
        self.store = store
        self.provider = provider
        self.embedder = embedder
        self.templates = templates
        self.repository = repository
        self.memory = memory

    # -- public entry points ---------------------------------------------------
    def run(self, question: str, session: ChatSession,
            config: OrchestratorConfig) -> PipelineTrace:
        if config.flags.multiagent_on:
            return self.answer(question, session, config)
        return self.answer_single_agent(question, session, config)

    def answer(self, question: str, session: ChatSession,
               config: OrchestratorConfig) -> PipelineTrace:
        """Full multi-agent pipeline with the bounded revision loop."""
        run = _PipelineRun(self, question, session, config)
        return run.execute_multi_agent()

    def answer_single_agent(self, question: str, session: ChatSession,
                            config: OrchestratorConfig) -> PipelineTrace:
        """One-shot variant: no validation gate, no inspection, no revisions."""
        run = _PipelineRun(self, question, session, config)
        return run.execute_single_agent()


class _PipelineRun:
    def __init__(self, orch: Orchestrator, question: str, session: ChatSession,
                 config: OrchestratorConfig):
        self.orch = orch
        self.question = question
        self.session = session
        self.config = config
        self.clock = config.clock or (lambda: datetime.now(timezone.utc))
        self.scratchpad = Scratchpad()
        self.attempts: List[SqlAttempt] = []
        self.provider_calls = 0
        self.memory_digest = self._memory_digest()

    # -- helpers ---------------------------------------------------------------
    def _memory_digest(self) -> str:
        pairs = self.orch.memory.recall(self.session, self.question,
                                        self.config.memory_m)
        if not pairs:
            return ""
        blocks = [f"Earlier Q: {user.text}\nEarlier A: {answer.text}"
                  for user, answer in pairs]
        return "\n".join(blocks)

    def _fewshot(self) -> Sequence[FewShotExample]:
        if not self.config.flags.fewshot_on or self.config.fewshot_k == 0:
            return ()
        result = self.orch.repository.retrieve(self.question, self.config.fewshot_k)
        return [self.orch.repository.get(example_id)
                for example_id in result.example_ids()]

    def _prompt(self, role: AgentRole, fewshot: Sequence[FewShotExample],
                digest: str) -> RenderedPrompt:
        if self.config.flags.prompt_on:
            return render(self.orch.templates.for_role(role), self.question,
                          fewshot, digest, role)
        return render_minimal(self.question, self.orch.store.catalog)

    def _call(self, messages: Tuple[ChatMessage, ...]) -> str:
        if self.provider_calls >= self.config.max_provider_calls:
            raise _BudgetExceeded()
        self.provider_calls += 1
        response = self.orch.provider.complete(ChatRequest(messages=messages))
        return response.content

    def _ask(self, role: AgentRole, expected_actions: Tuple[str, ...],
             fewshot: Sequence[FewShotExample] = (),
             digest: str = "") -> dict:
        """One agent turn under the JSON contract, with a single re-ask."""
        prompt = self._prompt(role, fewshot, digest)
        content = self._call(prompt.messages)
        try:
            doc = parse_agent_reply(content)
            if doc["action"] not in expected_actions:
                raise ReplyFormatError(f"unexpected action {doc['action']!r}")
            return doc
        except ReplyFormatError:
            retry_messages = prompt.messages + (
                ChatMessage("assistant", content),
                ChatMessage("user", _REASK_TEXT),
            )
            content = self._call(retry_messages)
            try:
                doc = parse_agent_reply(content)
            except ReplyFormatError as exc:
                raise _StepFailed(f"{role.value} reply unusable: {exc}") from exc
            if doc["action"] not in expected_actions:
                raise _StepFailed(
                    f"{role.value} returned unexpected action {doc['action']!r}")
            return doc

    def _note(self, role: AgentRole, kind: EntryKind, content: str) -> None:
        self.scratchpad.append(role, kind, content, self.clock())

    def _shared_digest(self) -> str:
        parts = []
        if self.memory_digest:
            parts.append(self.memory_digest)
        pad = self.scratchpad.digest()
        if pad:
            parts.append(pad)
        return "\n".join(parts)

    def _finish(self, answer: str, outcome: Outcome) -> PipelineTrace:
        trace = PipelineTrace(
            question=self.question,
            scratchpad=self.scratchpad,
            sql_attempts=self.attempts,
            final_answer=answer,
            outcome=outcome,
            iterations_used=len(self.attempts),
            feature_flags=self.config.flags,
        )
        self.orch.memory.commit(self.session, self.question, answer)
        for observer in list(_trace_observers):
            observer(trace)
        return trace

    def _abort_with_partial_trace(self, exc: ProviderError) -> None:
        exc.trace = PipelineTrace(  # type: ignore[attr-defined]
            question=self.question,
            scratchpad=self.scratchpad,
            sql_attempts=self.attempts,
            final_answer="",
            outcome=Outcome.FAILED,
            iterations_used=len(self.attempts),
            feature_flags=self.config.flags,
        )
        raise exc

    # -- the state machines -----------------------------------------------------
    def _plan(self) -> Optional[PipelineTrace]:
        """Run the PLAN step; returns a finished trace for the chat branch."""
        try:
            doc = self._ask(AgentRole.MANAGER, ("query_database", "chat"),
                            digest=self.memory_digest)
        except _StepFailed as failure:
            self._note(AgentRole.MANAGER, EntryKind.PLAN,
                       f"planning failed: {failure.reason}")
            return self._finish(FAILURE_ANSWER, Outcome.FAILED)
        if doc["action"] == "chat":
            self._note(AgentRole.MANAGER, EntryKind.CHAT, str(doc["action_input"]))
            return self._finish(str(doc["action_input"]), Outcome.CHAT_ONLY)
        self._note(AgentRole.MANAGER, EntryKind.PLAN, str(doc["action_input"]))
        return None

    def _generate_sql(self) -> str:
        doc = self._ask(AgentRole.ENGINEER, ("submit_sql",),
                        fewshot=self._fewshot(), digest=self._shared_digest())
        sql = str(doc["action_input"]).strip()
        self._note(AgentRole.ENGINEER, EntryKind.SQL_DRAFT, sql)
        return sql

    def _inspect(self, context: str) -> None:
        doc = self._ask(AgentRole.QUALITY, ("advise",),
                        digest=self._shared_digest() + "\n" + context)
        self._note(AgentRole.QUALITY, EntryKind.INSPECTION, str(doc["action_input"]))

    def _interpret(self) -> str:
        doc = self._ask(AgentRole.ANALYST, ("final_answer",),
                        digest=self._shared_digest())
        answer = str(doc["action_input"])
        self._note(AgentRole.ANALYST, EntryKind.INTERPRETATION, answer)
        return answer

    def execute_multi_agent(self) -> PipelineTrace:
        try:
            chat_trace = self._plan()
            if chat_trace is not None:
                return chat_trace

            empty_retry_used = False
            for iteration in range(1, self.config.max_iterations + 1):
                last = iteration == self.config.max_iterations
                try:
                    sql = self._generate_sql()
                except _StepFailed:
                    return self._finish(FAILURE_ANSWER, Outcome.FAILED)

                report = validate_sql(sql, self.orch.store.catalog)
                diag_text = "; ".join(
                    f"{d.code}: {d.message}" for d in report.diagnostics)
                self._note(AgentRole.QUALITY, EntryKind.VALIDATION,
                           f"verdict={report.verdict.value}"
                           + (f"; {diag_text}" if diag_text else ""))
                attempt = SqlAttempt(sql=sql, report=report)
                self.attempts.append(attempt)

                if not report.executable:
                    if last:
                        break
                    try:
                        self._inspect(f"validation diagnostics: {diag_text}")
                    except _StepFailed:
                        return self._finish(FAILURE_ANSWER, Outcome.FAILED)
                    continue

                try:
                    result = self.orch.store.execute(
                        sql, max_rows=self.config.max_rows,
                        timeout_s=self.config.timeout_s)
                except ExecutionError as exc:
                    self._note(AgentRole.QUALITY, EntryKind.EXECUTION, exc.log)
                    if last:
                        break
                    try:
                        self._inspect(f"execution log: {exc.log}")
                    except _StepFailed:
                        return self._finish(FAILURE_ANSWER, Outcome.FAILED)
                    continue

                attempt.result = result
                self._note(AgentRole.ENGINEER, EntryKind.EXECUTION,
                           render_result_preview(result))

                if result.row_count == 0 and not empty_retry_used and not last:
                    # An empty result is suspicious; give the analyst one
                    # chance to send the engineer back, on the same budget.
                    empty_retry_used = True
                    try:
                        self._inspect("the query ran but returned zero rows; "
                                      "check filters, joins and date handling")
                    except _StepFailed:
                        return self._finish(FAILURE_ANSWER, Outcome.FAILED)
                    continue

                try:
                    answer = self._interpret()
                except _StepFailed:
                    return self._finish(FAILURE_ANSWER, Outcome.FAILED)
                return self._finish(answer, Outcome.ANSWERED)

            return self._finish(FAILURE_ANSWER, Outcome.FAILED)
        except _BudgetExceeded:
            return self._finish(FAILURE_ANSWER, Outcome.FAILED)
        except ProviderError as exc:
            self._abort_with_partial_trace(exc)
            raise  # unreachable; _abort always raises

    def execute_single_agent(self) -> PipelineTrace:
        try:
            chat_trace = self._plan()
            if chat_trace is not None:
                return chat_trace

            try:
                sql = self._generate_sql()
            except _StepFailed:
                return self._finish(FAILURE_ANSWER, Outcome.FAILED)

            # The validator runs for the record only: nothing is gated on it
            # and the quality analyst never enters in this variant.
            report = validate_sql(sql, self.orch.store.catalog)
            attempt = SqlAttempt(sql=sql, report=report)
            self.attempts.append(attempt)

            try:
                result = self.orch.store.execute(
                    sql, max_rows=self.config.max_rows,
                    timeout_s=self.config.timeout_s)
            except ExecutionError as exc:
                self._note(AgentRole.ENGINEER, EntryKind.EXECUTION, exc.log)
                return self._finish(FAILURE_ANSWER, Outcome.FAILED)

            attempt.result = result
            self._note(AgentRole.ENGINEER, EntryKind.EXECUTION,
                       render_result_preview(result))
            try:
                answer = self._interpret()
            except _StepFailed:
                return self._finish(FAILURE_ANSWER, Outcome.FAILED)
            return self._finish(answer, Outcome.ANSWERED)
        except _BudgetExceeded:
            return self._finish(FAILURE_ANSWER, Outcome.FAILED)
        except ProviderError as exc:
            self._abort_with_partial_trace(exc)
            raise
