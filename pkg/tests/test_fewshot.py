"""Retrieval tests: exact agreement with a brute-force cosine-sort oracle."""

from __future__ import annotations

import random

import pytest

from tpgpt.fewshot import (
    DuplicateIdError,
    ExampleRepository,
    InvalidExampleSqlError,
    ScenarioTag,
    starter_repository,
)
from tpgpt.llm import HashingEmbedder, cosine
from tpgpt.schema import default_catalog

CATALOG = default_catalog()

_WORDS = ("traffic", "speed", "volume", "lane", "hov", "segment", "peak",
          "morning", "evening", "emissions", "vmt", "route", "detector",
          "i-5", "sr-520", "average", "count", "weekend", "weekday", "score")


def random_question(rng: random.Random) -> str:
    return " ".join(rng.choices(_WORDS, k=rng.randint(2, 8)))


def seeded_repository(n: int, seed: int = 0) -> ExampleRepository:
    rng = random.Random(seed)
    embedder = HashingEmbedder()
    repo = ExampleRepository(embedder, CATALOG)
    tags = list(ScenarioTag)
    for i in range(n):
        repo.add_example(
            f"ex{i:03d}",
            random_question(rng),
            "SELECT route, COUNT(*) AS n FROM dbo.cabinets GROUP BY route",
            tags[i % len(tags)],
        )
    return repo


def brute_force(repo: ExampleRepository, embedder, question: str, k: int):
    query = embedder.embed(question)
    ranked = sorted(
        ((cosine(query, ex.embedding), ex.example_id) for ex in repo.examples()),
        key=lambda pair: (-pair[0], pair[1]),
    )
    return [(example_id, score) for score, example_id in ranked[:k]]


def test_add_then_self_retrieve():
    repo = seeded_repository(10)
    example = repo.add_example(
        "self", "will the evening peak be bad on I-405 today?",
        "SELECT AVG(tps) FROM dbo.SegmentTrafficIndex", ScenarioTag.PATTERN)
    result = repo.retrieve(example.question, k=1)
    assert result.example_ids() == ["self"]
    assert result.hits[0][1] == pytest.approx(1.0, abs=1e-9)


def test_duplicate_id_rejected():
    repo = seeded_repository(3)
    with pytest.raises(DuplicateIdError):
        repo.add_example("ex000", "again", "SELECT * FROM dbo.cabinets",
                         ScenarioTag.COUNTING)


def test_forbidden_sql_rejected():
    repo = seeded_repository(1)
    with pytest.raises(InvalidExampleSqlError) as err:
        repo.add_example("bad", "drop it", "DROP TABLE dbo.cabinets",
                         ScenarioTag.COUNTING)
    assert err.value.report.verdict.value == "ForbiddenStatement"


def test_risky_sql_rejected_too():
    repo = seeded_repository(1)
    with pytest.raises(InvalidExampleSqlError):
        repo.add_example("risky", "raw scan",
                         "SELECT speed FROM dbo.MinuteDataNW",
                         ScenarioTag.REAL_TIME_ADVISORY)


def test_size_grows_by_one():
    repo = seeded_repository(5)
    repo.add_example("one-more", "how many detectors?",
                     "SELECT COUNT(*) FROM dbo.cabinets", ScenarioTag.COUNTING)
    assert len(repo) == 6


def test_k_zero_and_empty_repository():
    embedder = HashingEmbedder()
    empty = ExampleRepository(embedder, CATALOG)
    assert empty.retrieve("anything", 5).hits == ()
    repo = seeded_repository(4)
    assert repo.retrieve("anything", 0).hits == ()
    with pytest.raises(ValueError):
        repo.retrieve("anything", -1)


def test_never_more_than_k_and_no_duplicates():
    repo = seeded_repository(50)
    for k in (1, 3, 10, 50, 99):
        result = repo.retrieve("traffic on i-5", k)
        assert len(result.hits) == min(k, 50)
        assert len(set(result.example_ids())) == len(result.hits)


def test_matches_brute_force_oracle_everywhere():
    embedder = HashingEmbedder()
    repo = seeded_repository(50, seed=4)
    rng = random.Random(99)
    for _ in range(100):
        question = random_question(rng)
        k = rng.randint(0, 55)
        got = repo.retrieve(question, k)
        want = brute_force(repo, embedder, question, k)
        assert list(got.hits) == want, (question, k)


def test_scores_non_increasing():
    repo = seeded_repository(40, seed=2)
    hits = repo.retrieve("morning peak speed", 40).hits
    scores = [score for _id, score in hits]
    assert scores == sorted(scores, reverse=True)


def test_jsonl_round_trip(tmp_path):
    repo = seeded_repository(8, seed=5)
    path = tmp_path / "repo.jsonl"
    repo.save_jsonl(path)
    embedder = HashingEmbedder()
    loaded = ExampleRepository(embedder, CATALOG)
    assert loaded.load_jsonl(path) == 8
    assert sorted(e.example_id for e in loaded.examples()) == \
        sorted(e.example_id for e in repo.examples())
    original = repo.get("ex003")
    copy = loaded.get("ex003")
    assert (copy.question, copy.sql, copy.scenario_tag) == \
        (original.question, original.sql, original.scenario_tag)
    assert copy.embedding == original.embedding


def test_starter_repository_contract():
    repo = starter_repository(HashingEmbedder(), CATALOG)
    assert len(repo) >= 12
    tags = {ex.scenario_tag for ex in repo.examples()}
    assert tags == set(ScenarioTag)
