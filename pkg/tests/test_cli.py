"""CLI tests: each subcommand driven through main() in process."""

from __future__ import annotations

import filecmp
import json
from pathlib import Path

from tpgpt.cli import main

FIXTURES = Path(__file__).parent / "fixtures"
SMALL = ["--seed", "3", "--routes", "I-5", "--detectors-per-route", "2",
         "--days", "1"]
# Smallest shape build_tasks accepts: a full Monday-to-Sunday week.
SMALL_WEEK = ["--seed", "5", "--routes", "I-5,I-405",
              "--detectors-per-route", "2", "--days", "7"]


def test_generate_is_deterministic(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["generate", *SMALL, "--out", str(out_a)]) == 0
    assert main(["generate", *SMALL, "--out", str(out_b)]) == 0
    names = sorted(p.name for p in out_a.iterdir())
    assert names == sorted(p.name for p in out_b.iterdir())
    match, mismatch, errors = filecmp.cmpfiles(out_a, out_b, names,
                                               shallow=False)
    assert mismatch == [] and errors == []
    assert len(match) == 6


def test_ingest_reports_counts(tmp_path, capsys):
    out = tmp_path / "csv"
    main(["generate", *SMALL, "--out", str(out)])
    assert main(["ingest", "--csv", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "dbo.MinuteDataNW: 2880 rows" in printed


def test_ingest_rejects_bad_dir(tmp_path, capsys):
    assert main(["ingest", "--csv", str(tmp_path / "missing")]) == 1
    assert "ingest failed" in capsys.readouterr().err


def test_ask_chat_fixture(tmp_path, capsys):
    trace_out = tmp_path / "trace.json"
    code = main(["ask", *SMALL,
                 "--question", "hello, what can you do?",
                 "--fixture", str(FIXTURES / "chat_fixture.json"),
                 "--trace-out", str(trace_out)])
    assert code == 0
    printed = capsys.readouterr().out
    assert "Ask me about traffic" in printed
    doc = json.loads(trace_out.read_text())
    assert doc["outcome"] == "ChatOnly"
    assert doc["sql_attempts"] == []


def test_ask_requires_fixture_or_live(capsys):
    assert main(["ask", *SMALL, "--question", "q"]) == 2
    assert "--fixture" in capsys.readouterr().err


def test_bench_oracle_replay_prints_perfect_score(tmp_path, capsys):
    report_path = tmp_path / "report.json"
    tasks_path = tmp_path / "tasks.jsonl"
    code = main(["bench", *SMALL_WEEK, "--save-tasks", str(tasks_path),
                 "--out", str(report_path)])
    assert code == 0
    printed = capsys.readouterr().out
    assert "1.00" in printed
    doc = json.loads(report_path.read_text())
    assert doc["average_score"] == 1.0
    assert doc["task_count"] >= 20
    lines = [l for l in tasks_path.read_text().splitlines() if l.strip()]
    assert len(lines) >= 20


def test_bench_ablation_produces_four_variants(tmp_path, capsys):
    report_path = tmp_path / "ablation.json"
    code = main(["bench", *SMALL_WEEK, "--ablation", "--out", str(report_path)])
    assert code == 0
    printed = capsys.readouterr().out
    for variant in ("full", "no_prompt", "no_fewshot", "no_multiagent"):
        assert variant in printed
    doc = json.loads(report_path.read_text())
    assert set(doc) == {"full", "no_prompt", "no_fewshot", "no_multiagent"}
