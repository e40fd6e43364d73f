"""Curated question/query example repository with similarity retrieval.

The repository is small by design (tens of hand-written exemplars), so
retrieval is an exact linear scan over cached embeddings: top-k by cosine
similarity, ties broken by example id.  Examples are rejected unless their
SQL validates cleanly against the reference catalog, which keeps bad
exemplars from steering the query writer off a cliff.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .llm import EmbeddingVector, cosine
from .schema import SchemaCatalog
from .sqlguard import ValidationReport, Verdict, validate_sql

STARTER_EXAMPLES_PATH = Path(__file__).parent / "assets" / "starter_examples.jsonl"


class ScenarioTag(str, enum.Enum):
    REAL_TIME_ADVISORY = "real_time_advisory"
    HISTORICAL_STATS = "historical_stats"
    EMISSIONS = "emissions"
    LANE_BASED = "lane_based"
    COUNTING = "counting"
    PATTERN = "pattern"


class DuplicateIdError(ValueError):
    """An example with this id is already in the repository."""


class InvalidExampleSqlError(ValueError):
    """Example SQL failed validation; carries the ValidationReport."""

    def __init__(self, message: str, report: ValidationReport):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class FewShotExample:
    example_id: str
    question: str
    sql: str
    scenario_tag: ScenarioTag
    embedding: EmbeddingVector


@dataclass(frozen=True)
class RetrievalResult:
    hits: Tuple[Tuple[str, float], ...]  # (example_id, cosine score), best first
    k: int

    def example_ids(self) -> List[str]:
        return [example_id for example_id, _score in self.hits]


class ExampleRepository:
    def __init__(self, embedder, catalog: SchemaCatalog):
        self._embedder = embedder
        self._catalog = catalog
        self._examples: Dict[str, FewShotExample] = {}

    def __len__(self) -> int:
        return len(self._examples)

    def __contains__(self, example_id: str) -> bool:
        return example_id in self._examples

    def get(self, example_id: str) -> Optional[FewShotExample]:
        return self._examples.get(example_id)

    def examples(self) -> List[FewShotExample]:
        return list(self._examples.values())

    def add_example(self, example_id: str, question: str, sql: str,
                    scenario_tag: ScenarioTag | str) -> FewShotExample:
        """Validate, embed and store one exemplar; returns the stored record."""
        if example_id in self._examples:
            raise DuplicateIdError(f"example id {example_id!r} already present")
        report = validate_sql(sql, self._catalog)
        if report.verdict is not Verdict.OK:
            raise InvalidExampleSqlError(
                f"example {example_id!r} SQL is not cleanly valid: "
                f"{report.verdict.value}", report)
        example = FewShotExample(
            example_id=example_id,
            question=question,
            sql=sql,
            scenario_tag=ScenarioTag(scenario_tag),
            embedding=self._embedder.embed(question),
        )
        self._examples[example_id] = example
        return example

    def retrieve(self, question: str, k: int) -> RetrievalResult:
        """Top-k stored examples by cosine similarity to the question."""
        if k < 0:
            raise ValueError("k must be >= 0")
        if k == 0 or not self._examples:
            return RetrievalResult(hits=(), k=k)
        query = self._embedder.embed(question)
        scored = sorted(
            ((cosine(query, ex.embedding), ex.example_id)
             for ex in self._examples.values()),
            key=lambda pair: (-pair[0], pair[1]),
        )
        hits = tuple((example_id, score) for score, example_id in scored[:k])
        return RetrievalResult(hits=hits, k=k)

    # -- persistence: one JSON object per line -----------------------------------
    def save_jsonl(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for example in self._examples.values():
                fh.write(json.dumps({
                    "example_id": example.example_id,
                    "question": example.question,
                    "sql": example.sql,
                    "scenario_tag": example.scenario_tag.value,
                }) + "\n")

    def load_jsonl(self, path: str | Path) -> int:
        """Add every example from a JSONL file; returns how many were added."""
        added = 0
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                doc = json.loads(line)
                self.add_example(doc["example_id"], doc["question"], doc["sql"],
                                 doc["scenario_tag"])
                added += 1
        return added


def starter_repository(embedder, catalog: SchemaCatalog) -> ExampleRepository:
    """The shipped exemplar inventory covering all six scenario tags."""
    repo = ExampleRepository(embedder, catalog)
    repo.load_jsonl(STARTER_EXAMPLES_PATH)
    return repo
