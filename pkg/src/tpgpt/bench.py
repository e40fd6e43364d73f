"""Benchmark harness: task suite, three-tier grading, and the average score.

Every task pairs a question with ground-truth SQL and a canonical digest of
its result on the reference dataset.  A pipeline run is graded into one of
three tiers -- no executed query at all, a query that ran but returned the
wrong data, or a digest-exact match -- and a suite is summarized as the
rate-weighted average score S = sum(n_i * s_i) / (s_max * sum(n_i)) with
tier scores (0, 1, 2).
"""

from __future__ import annotations

import enum
import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .fewshot import ScenarioTag
from .gateway import ExecutionError, TrafficStore
from .llm import ProviderError, ScriptedProvider
from .memory import MemoryStore
from .orchestrator import (
    FeatureFlags,
    Orchestrator,
    OrchestratorConfig,
    Outcome,
    PipelineTrace,
)
from .prompts import TemplateSet
from .sqlguard import Verdict, validate_sql
from .synth import SyntheticDataset, generate_synthetic_network

REFERENCE_SEED = 7
REFERENCE_ROUTES = ("I-5", "I-405", "SR-99", "SR-520")
REFERENCE_DETECTORS_PER_ROUTE = 4
REFERENCE_DAYS = 7

_ORDER_BY = re.compile(r"\border\s+by\b", re.IGNORECASE)


class Category(enum.Enum):
    NON_FUNCTIONAL = ("non_functional", 0)
    RUNNABLE_IMPERFECT = ("runnable_imperfect", 1)
    FLAWLESS = ("flawless", 2)

    def __init__(self, label: str, rate_score: int):
        self.label = label
        self.rate_score = rate_score


S_MAX = 2


class EmptyTallyError(ValueError):
    """score() needs at least one graded task."""


class GroundTruthInvalidError(ValueError):
    """An authored ground truth failed validation or execution."""


@dataclass(frozen=True)
class BenchmarkTask:
    task_id: str
    question: str
    ground_truth_sql: str
    ground_truth_digest: str
    scenario_tag: ScenarioTag


@dataclass(frozen=True)
class ScoreTally:
    counts: Dict[Category, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def n(self, category: Category) -> int:
        return self.counts.get(category, 0)

    def percentages(self) -> Dict[Category, float]:
        if self.total == 0:
            return {c: 0.0 for c in Category}
        return {c: 100.0 * self.n(c) / self.total for c in Category}

    @classmethod
    def from_counts(cls, non_functional: int, runnable_imperfect: int,
                    flawless: int) -> "ScoreTally":
        return cls(counts={
            Category.NON_FUNCTIONAL: non_functional,
            Category.RUNNABLE_IMPERFECT: runnable_imperfect,
            Category.FLAWLESS: flawless,
        })


@dataclass
class EvalOutcome:
    task_id: str
    category: Category
    trace: Optional[PipelineTrace]
    reason: str


def score(tally: ScoreTally) -> float:
    """Average performance score over graded tasks, in [0, 1]."""
    if tally.total == 0:
        raise EmptyTallyError("no graded tasks to score")
    weighted = sum(tally.n(c) * c.rate_score for c in Category)
    return weighted / (S_MAX * tally.total)


# ---------------------------------------------------------------------------
# Canonical result digests


def _canonical_cell(value):
    if value is None:
        return None
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, (int, float)):
        rounded = round(float(value), 6)
        if rounded == int(rounded) and abs(rounded) < 2 ** 53:
            return int(rounded)
        return rounded
    return str(value)


def canonical_rows(rows: Sequence[tuple], ordered: bool) -> List[list]:
    """Normalize cells (numbers rounded to 6 decimals, int/float unified)
    and, unless row order is meaningful, sort rows into a canonical order."""
    canon = [[_canonical_cell(v) for v in row] for row in rows]
    if not ordered:
        canon.sort(key=lambda row: json.dumps(row, separators=(",", ":")))
    return canon


def result_digest(rows: Sequence[tuple], ordered: bool) -> str:
    doc = json.dumps(canonical_rows(rows, ordered), separators=(",", ":"))
    return hashlib.sha256(doc.encode("utf-8")).hexdigest()


def order_matters(sql: str) -> bool:
    return bool(_ORDER_BY.search(sql))


# ---------------------------------------------------------------------------
# Grading


def classify(trace: Optional[PipelineTrace], task: BenchmarkTask,
             reason: str = "") -> EvalOutcome:
    """Pure three-tier grading of one pipeline trace against its task."""
    final = trace.final_result() if trace is not None else None
    if trace is None or trace.outcome is Outcome.FAILED or final is None:
        return EvalOutcome(
            task_id=task.task_id, category=Category.NON_FUNCTIONAL, trace=trace,
            reason=reason or "no successfully executed query in the trace")
    digest = result_digest(final.rows, order_matters(task.ground_truth_sql))
    if digest == task.ground_truth_digest:
        return EvalOutcome(
            task_id=task.task_id, category=Category.FLAWLESS, trace=trace,
            reason="result digest matches the ground truth")
    return EvalOutcome(
        task_id=task.task_id, category=Category.RUNNABLE_IMPERFECT, trace=trace,
        reason="a query executed but its result does not match the ground truth")


@dataclass
class BenchmarkReport:
    label: str
    outcomes: List[EvalOutcome]
    tally: ScoreTally
    average_score: float

    def to_dict(self) -> dict:
        pct = self.tally.percentages()
        return {
            "label": self.label,
            "task_count": self.tally.total,
            "counts": {c.label: self.tally.n(c) for c in Category},
            "percentages": {c.label: round(pct[c], 4) for c in Category},
            "average_score": self.average_score,
            "outcomes": [
                {"task_id": o.task_id, "category": o.category.label,
                 "reason": o.reason}
                for o in self.outcomes
            ],
        }


def run_benchmark(tasks: Sequence[BenchmarkTask],
                  runner: Callable[[BenchmarkTask], PipelineTrace],
                  label: str = "pipeline") -> BenchmarkReport:
    """Drive the runner over every task and grade each trace.

    Provider faults for one task grade that task non-functional (with the
    fault as the reason) instead of aborting the whole run.
    """
    outcomes: List[EvalOutcome] = []
    for task in tasks:
        try:
            trace = runner(task)
        except ProviderError as exc:
            partial = getattr(exc, "trace", None)
            outcomes.append(classify(partial, task,
                                     reason=f"provider fault: {exc}"))
            continue
        outcomes.append(classify(trace, task))
    counts = {c: 0 for c in Category}
    for outcome in outcomes:
        counts[outcome.category] += 1
    tally = ScoreTally(counts=counts)
    return BenchmarkReport(
        label=label, outcomes=outcomes, tally=tally,
        average_score=score(tally))


def format_report_table(reports: Sequence[BenchmarkReport]) -> str:
    """Plain-text comparison table: per-category counts, shares, average score."""
    header = (f"{'variant':<16} {'non-functional':>18} {'runnable-imperfect':>20} "
              f"{'flawless':>16} {'avg score':>10}")
    lines = [header, "-" * len(header)]
    for report in reports:
        pct = report.tally.percentages()

        def cell(category: Category) -> str:
            return f"{report.tally.n(category)} ({pct[category]:.0f}%)"

        lines.append(
            f"{report.label:<16} {cell(Category.NON_FUNCTIONAL):>18} "
            f"{cell(Category.RUNNABLE_IMPERFECT):>20} "
            f"{cell(Category.FLAWLESS):>16} {report.average_score:>10.2f}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Task construction against the reference dataset


def reference_dataset(seed: int = REFERENCE_SEED) -> SyntheticDataset:
    return generate_synthetic_network(
        seed=seed,
        routes=list(REFERENCE_ROUTES),
        detectors_per_route=REFERENCE_DETECTORS_PER_ROUTE,
        days=REFERENCE_DAYS,
    )


def _task_templates(dataset: SyntheticDataset) -> List[Tuple[ScenarioTag, str, str]]:
    """(tag, question, sql) triples bound to the dataset's routes and dates."""
    routes = dataset.routes
    r = {i: routes[i % len(routes)] for i in range(4)}
    days = dataset.local_dates()
    monday, tuesday, wednesday = days[0], days[1], days[2]
    thursday, friday = days[3], days[4]
    saturday, sunday = days[5], days[6]
    last_day = days[-1]
    sample_detector = next(
        d.detector_id for d in dataset.detectors if d.route == r[0])

    t: List[Tuple[ScenarioTag, str, str]] = []
    rt = ScenarioTag.REAL_TIME_ADVISORY
    hist = ScenarioTag.HISTORICAL_STATS
    em = ScenarioTag.EMISSIONS
    lane = ScenarioTag.LANE_BASED
    cnt = ScenarioTag.COUNTING
    pat = ScenarioTag.PATTERN

    t.append((rt,
        f"Show me the most recent loop data on {r[2]} northbound sorted by location.",
        f"SELECT c.detector_id, c.milepost, m.speed, m.volume, m.occupancy "
        f"FROM dbo.MinuteDataNW m JOIN dbo.cabinets c ON m.detector_id = c.detector_id "
        f"WHERE c.route = '{r[2]}' AND c.direction = 'N' "
        f"AND m.timestamp = (SELECT MAX(timestamp) FROM dbo.MinuteDataNW) "
        f"ORDER BY c.milepost LIMIT 50"))
    t.append((rt,
        f"What is the current average speed on {r[0]} northbound?",
        f"SELECT AVG(m.speed) AS avg_speed_mph FROM dbo.MinuteDataNW m "
        f"JOIN dbo.cabinets c ON m.detector_id = c.detector_id "
        f"WHERE c.route = '{r[0]}' AND c.direction = 'N' "
        f"AND m.timestamp = (SELECT MAX(timestamp) FROM dbo.MinuteDataNW)"))
    t.append((rt,
        f"What is the latest traffic performance score on each segment of {r[3]}?",
        f"SELECT t.segment_id, t.tps FROM dbo.SegmentTrafficIndex t "
        f"JOIN dbo.Segments s ON t.segment_id = s.segment_id "
        f"WHERE s.route = '{r[3]}' AND t.lane_class = 'GP' "
        f"AND t.timestamp = (SELECT MAX(timestamp) FROM dbo.SegmentTrafficIndex) "
        f"ORDER BY t.segment_id LIMIT 50"))
    t.append((rt,
        f"Which detectors on {r[1]} were slower than 45 mph at 5 PM on {friday}?",
        f"SELECT c.detector_id, m.speed FROM dbo.MinuteDataNW m "
        f"JOIN dbo.cabinets c ON m.detector_id = c.detector_id "
        f"WHERE c.route = '{r[1]}' AND m.local_timestamp = '{friday}T17:00:00' "
        f"AND m.speed < 45 ORDER BY c.detector_id LIMIT 50"))

    t.append((hist,
        f"What was the average traffic performance score on {r[0]} on {tuesday}?",
        f"SELECT AVG(t.tps) AS avg_tps FROM dbo.SegmentTrafficIndex t "
        f"JOIN dbo.Segments s ON t.segment_id = s.segment_id "
        f"WHERE s.route = '{r[0]}' AND t.lane_class = 'GP' "
        f"AND date(t.local_timestamp) = '{tuesday}'"))
    t.append((hist,
        f"What was the traffic condition of {r[3]} during the evening peak on "
        f"{wednesday}?",
        f"SELECT AVG(t.tps) AS evening_peak_tps FROM dbo.SegmentTrafficIndex t "
        f"JOIN dbo.Segments s ON t.segment_id = s.segment_id "
        f"WHERE s.route = '{r[3]}' AND t.lane_class = 'GP' "
        f"AND date(t.local_timestamp) = '{wednesday}' "
        f"AND strftime('%H', t.local_timestamp) IN ('15', '16', '17')"))
    t.append((hist,
        f"Give the daily mean performance score on {r[1]} for each day on record.",
        f"SELECT t.date, AVG(t.mean_tps) AS mean_tps FROM dbo.TrafficIndex t "
        f"JOIN dbo.Segments s ON t.segment_id = s.segment_id "
        f"WHERE s.route = '{r[1]}' GROUP BY t.date ORDER BY t.date"))
    t.append((hist,
        f"What were the five slowest detector readings on {r[0]} during the "
        f"morning peak of {thursday}?",
        f"SELECT c.detector_id, m.local_timestamp, m.speed FROM dbo.MinuteDataNW m "
        f"JOIN dbo.cabinets c ON m.detector_id = c.detector_id "
        f"WHERE c.route = '{r[0]}' AND date(m.local_timestamp) = '{thursday}' "
        f"AND strftime('%H', m.local_timestamp) IN ('06', '07', '08') "
        f"ORDER BY m.speed ASC, m.local_timestamp ASC, c.detector_id ASC LIMIT 5"))

    vmt_expr = "m.volume * s.length_miles / s.detector_count"
    em_joins = ("FROM dbo.MinuteDataNW m "
                "JOIN dbo.cabinets c ON m.detector_id = c.detector_id "
                "JOIN dbo.Segments s ON c.segment_id = s.segment_id")
    t.append((em,
        "What is the difference in greenhouse gas emissions between weekdays "
        "and weekend days on record?",
        f"SELECT CASE WHEN strftime('%w', m.local_timestamp) IN ('0', '6') "
        f"THEN 'weekend' ELSE 'weekday' END AS day_type, "
        f"ROUND(SUM({vmt_expr}) * 400.0, 1) AS grams_co2e {em_joins} "
        f"GROUP BY day_type ORDER BY day_type"))
    t.append((em,
        f"Estimate the total CO2 emissions on {r[0]} on {tuesday}.",
        f"SELECT ROUND(SUM({vmt_expr}) * 400.0, 1) AS grams_co2e {em_joins} "
        f"WHERE c.route = '{r[0]}' AND date(m.local_timestamp) = '{tuesday}'"))
    t.append((em,
        f"Which route produced the most vehicle miles of travel on {saturday}?",
        f"SELECT c.route, ROUND(SUM({vmt_expr}), 1) AS vmt {em_joins} "
        f"WHERE date(m.local_timestamp) = '{saturday}' "
        f"GROUP BY c.route ORDER BY vmt DESC LIMIT 1"))

    t.append((lane,
        f"Should I use the HOV or the general purpose lane on {r[0]} right now?",
        f"SELECT t.lane_class, AVG(t.avg_speed) AS speed_mph, AVG(t.tps) AS tps "
        f"FROM dbo.SegmentTrafficIndex t "
        f"JOIN dbo.Segments s ON t.segment_id = s.segment_id "
        f"WHERE s.route = '{r[0]}' "
        f"AND t.timestamp = (SELECT MAX(timestamp) FROM dbo.SegmentTrafficIndex) "
        f"GROUP BY t.lane_class ORDER BY t.lane_class"))
    t.append((lane,
        f"Compare HOV and general purpose speeds on {r[1]} during the evening "
        f"peak of {friday}.",
        f"SELECT t.lane_class, AVG(t.avg_speed) AS avg_speed "
        f"FROM dbo.SegmentTrafficIndex t "
        f"JOIN dbo.Segments s ON t.segment_id = s.segment_id "
        f"WHERE s.route = '{r[1]}' AND date(t.local_timestamp) = '{friday}' "
        f"AND strftime('%H', t.local_timestamp) IN ('15', '16', '17') "
        f"GROUP BY t.lane_class ORDER BY t.lane_class"))
    t.append((lane,
        f"On which {r[3]} segments was the carpool lane faster than the general "
        f"lane at 8 AM on {wednesday}?",
        f"SELECT g.segment_id, g.avg_speed AS gp_speed, h.avg_speed AS hov_speed "
        f"FROM dbo.SegmentTrafficIndex g JOIN dbo.SegmentTrafficIndex h "
        f"ON g.segment_id = h.segment_id AND g.local_timestamp = h.local_timestamp "
        f"WHERE g.lane_class = 'GP' AND h.lane_class = 'HOV' "
        f"AND g.local_timestamp = '{wednesday}T08:00:00' "
        f"AND h.avg_speed > g.avg_speed "
        f"AND g.segment_id IN (SELECT segment_id FROM dbo.Segments "
        f"WHERE route = '{r[3]}') ORDER BY g.segment_id LIMIT 50"))
    t.append((lane,
        f"What was the average HOV lane performance score across the network "
        f"on {thursday}?",
        f"SELECT AVG(tps) AS hov_tps FROM dbo.SegmentTrafficIndex "
        f"WHERE lane_class = 'HOV' AND date(local_timestamp) = '{thursday}'"))

    t.append((cnt,
        f"On average, how many vehicles per minute were on each segment of "
        f"{r[1]} on {last_day}?",
        f"SELECT t.segment_id, AVG(t.total_volume) AS avg_vehicles_per_minute "
        f"FROM dbo.SegmentTrafficIndex t "
        f"JOIN dbo.Segments s ON t.segment_id = s.segment_id "
        f"WHERE s.route = '{r[1]}' AND t.lane_class = 'GP' "
        f"AND date(t.local_timestamp) = '{last_day}' "
        f"GROUP BY t.segment_id ORDER BY t.segment_id"))
    t.append((cnt,
        "How many loop detectors are installed on each route?",
        "SELECT route, COUNT(*) AS detector_count FROM dbo.cabinets "
        "GROUP BY route ORDER BY route"))
    t.append((cnt,
        f"How many vehicles passed detector {sample_detector} in total on "
        f"{tuesday}?",
        f"SELECT SUM(volume) AS total_vehicles FROM dbo.MinuteDataNW "
        f"WHERE detector_id = '{sample_detector}' "
        f"AND date(local_timestamp) = '{tuesday}'"))
    t.append((cnt,
        "How many minute observations are stored for each route?",
        "SELECT c.route, COUNT(*) AS observations FROM dbo.MinuteDataNW m "
        "JOIN dbo.cabinets c ON m.detector_id = c.detector_id "
        "GROUP BY c.route ORDER BY c.route"))

    t.append((pat,
        f"Compare traffic performance of {r[0]} between Monday and Sunday.",
        f"SELECT CASE WHEN strftime('%w', t.local_timestamp) = '1' "
        f"THEN 'Monday' ELSE 'Sunday' END AS day_name, AVG(t.tps) AS avg_tps "
        f"FROM dbo.SegmentTrafficIndex t "
        f"JOIN dbo.Segments s ON t.segment_id = s.segment_id "
        f"WHERE s.route = '{r[0]}' AND t.lane_class = 'GP' "
        f"AND strftime('%w', t.local_timestamp) IN ('0', '1') "
        f"GROUP BY day_name ORDER BY day_name"))
    t.append((pat,
        f"Is the morning or the evening peak worse on {r[1]} on weekdays?",
        f"SELECT CASE WHEN strftime('%H', t.local_timestamp) IN "
        f"('06', '07', '08') THEN 'am_peak' ELSE 'pm_peak' END AS peak, "
        f"AVG(t.tps) AS avg_tps FROM dbo.SegmentTrafficIndex t "
        f"JOIN dbo.Segments s ON t.segment_id = s.segment_id "
        f"WHERE s.route = '{r[1]}' AND t.lane_class = 'GP' "
        f"AND strftime('%w', t.local_timestamp) NOT IN ('0', '6') "
        f"AND strftime('%H', t.local_timestamp) IN "
        f"('06', '07', '08', '15', '16', '17') GROUP BY peak ORDER BY peak"))
    t.append((pat,
        "Which hour of the day has the lowest network-wide performance score "
        "on weekdays?",
        "SELECT strftime('%H', local_timestamp) AS hour, AVG(tps) AS avg_tps "
        "FROM dbo.SegmentTrafficIndex WHERE lane_class = 'GP' "
        "AND strftime('%w', local_timestamp) NOT IN ('0', '6') "
        "GROUP BY hour ORDER BY avg_tps ASC LIMIT 1"))
    t.append((pat,
        "Rank the days of the week by network-wide average performance score.",
        "SELECT strftime('%w', local_timestamp) AS weekday, AVG(tps) AS avg_tps "
        "FROM dbo.SegmentTrafficIndex WHERE lane_class = 'GP' "
        "GROUP BY weekday ORDER BY avg_tps DESC, weekday ASC"))
    return t


def build_tasks(dataset: SyntheticDataset, store: TrafficStore) -> List[BenchmarkTask]:
    """Instantiate the task suite and freeze ground-truth digests.

    Requires the reference dataset shape: at least 7 days starting on a
    Monday.  Every ground truth must validate cleanly, execute without
    error or truncation, and return at least one row.
    """
    if dataset.days < 7 or dataset.start.weekday() != 0:
        raise GroundTruthInvalidError(
            "task templates expect >= 7 days starting on a Monday")
    tasks: List[BenchmarkTask] = []
    for idx, (tag, question, sql) in enumerate(_task_templates(dataset), start=1):
        report = validate_sql(sql, store.catalog)
        if report.verdict is not Verdict.OK:
            raise GroundTruthInvalidError(
                f"task {idx} ground truth does not validate: "
                f"{report.verdict.value} ({question})")
        try:
            result = store.execute(sql, max_rows=1000, timeout_s=30.0)
        except ExecutionError as exc:
            raise GroundTruthInvalidError(
                f"task {idx} ground truth failed to execute: {exc}") from exc
        if result.truncated:
            raise GroundTruthInvalidError(f"task {idx} ground truth truncates")
        if result.row_count == 0:
            raise GroundTruthInvalidError(
                f"task {idx} ground truth returns no rows ({question})")
        tasks.append(BenchmarkTask(
            task_id=f"TQ{idx:03d}",
            question=question,
            ground_truth_sql=sql,
            ground_truth_digest=result_digest(result.rows, order_matters(sql)),
            scenario_tag=tag,
        ))
    return tasks


def save_tasks_jsonl(tasks: Sequence[BenchmarkTask], path: "str | Path") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for task in tasks:
            fh.write(json.dumps({
                "task_id": task.task_id,
                "question": task.question,
                "ground_truth_sql": task.ground_truth_sql,
                "digest": task.ground_truth_digest,
                "scenario_tag": task.scenario_tag.value,
            }) + "\n")


def load_tasks_jsonl(path: "str | Path") -> List[BenchmarkTask]:
    tasks = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            doc = json.loads(line)
            tasks.append(BenchmarkTask(
                task_id=doc["task_id"],
                question=doc["question"],
                ground_truth_sql=doc["ground_truth_sql"],
                ground_truth_digest=doc["digest"],
                scenario_tag=ScenarioTag(doc["scenario_tag"]),
            ))
    return tasks


# ---------------------------------------------------------------------------
# Scripted runners


def _agent_json(thought: str, action: str, action_input: str) -> str:
    return json.dumps(
        {"thought": thought, "action": action, "action_input": action_input})


def oracle_transcript(task: BenchmarkTask) -> List[dict]:
    """Fixture transcript that replays the task's ground truth verbatim."""
    return [
        {"expect_role": "user", "response_text": _agent_json(
            "The question needs warehouse data.", "query_database",
            "Query the warehouse and report the findings.")},
        {"expect_role": "user", "response_text": _agent_json(
            "Replay the reference query.", "submit_sql", task.ground_truth_sql)},
        {"expect_role": "user", "response_text": _agent_json(
            "Summarize the rows.", "final_answer",
            f"Here is what the data shows for: {task.question}")},
    ]


def make_scripted_runner(
    store: TrafficStore,
    embedder,
    templates: TemplateSet,
    repository,
    config: OrchestratorConfig,
    transcript_for: Callable[[BenchmarkTask], List[dict]] = oracle_transcript,
) -> Callable[[BenchmarkTask], PipelineTrace]:
    """Runner that answers each task with a fresh scripted provider/session."""
    memory = MemoryStore(embedder, clock=config.clock)

    def runner(task: BenchmarkTask) -> PipelineTrace:
        provider = ScriptedProvider.from_list(transcript_for(task))
        orch = Orchestrator(store, provider, embedder, templates, repository,
                            memory)
        session = memory.create_session(f"bench-{task.task_id}-{len(memory.session_ids())}")
        return orch.run(task.question, session, config)

    return runner


ABLATION_VARIANTS: Dict[str, FeatureFlags] = {
    "full": FeatureFlags(prompt_on=True, fewshot_on=True, multiagent_on=True),
    "no_prompt": FeatureFlags(prompt_on=False, fewshot_on=True, multiagent_on=True),
    "no_fewshot": FeatureFlags(prompt_on=True, fewshot_on=False, multiagent_on=True),
    "no_multiagent": FeatureFlags(prompt_on=True, fewshot_on=True,
                                  multiagent_on=False),
}


def run_ablation(
    tasks: Sequence[BenchmarkTask],
    runner_factory: Callable[[FeatureFlags], Callable[[BenchmarkTask], PipelineTrace]],
) -> Dict[str, BenchmarkReport]:
    """One report per feature-toggle variant, keyed by variant name."""
    reports: Dict[str, BenchmarkReport] = {}
    for name, flags in ABLATION_VARIANTS.items():
        reports[name] = run_benchmark(tasks, runner_factory(flags), label=name)
    return reports
