#!/usr/bin/env python3
"""Run the four feature-toggle variants over the reference benchmark.

Oracle-replay transcripts drive every variant, so this reproduces the
variant *structure* (four independent reports) rather than live-model
quality differences; swap in a live provider via the CLI for the latter.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from tpgpt.bench import (
    build_tasks,
    format_report_table,
    make_scripted_runner,
    reference_dataset,
    run_ablation,
)
from tpgpt.fewshot import starter_repository
from tpgpt.gateway import TrafficStore
from tpgpt.llm import HashingEmbedder
from tpgpt.orchestrator import OrchestratorConfig
from tpgpt.prompts import TemplateSet


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--out", type=Path, default=Path("ablation_report.json"))
    args = parser.parse_args()

    dataset = reference_dataset(args.seed)
    store = TrafficStore()
    store.load_dataset(dataset)
    tasks = build_tasks(dataset, store)
    print(f"benchmark: {len(tasks)} tasks on seed {args.seed}")

    embedder = HashingEmbedder()
    templates = TemplateSet.load(store.catalog)
    repository = starter_repository(embedder, store.catalog)

    def factory(flags):
        config = OrchestratorConfig(flags=flags)
        return make_scripted_runner(store, embedder, templates, repository,
                                    config)

    reports = run_ablation(tasks, factory)
    print(format_report_table(list(reports.values())))
    args.out.write_text(
        json.dumps({name: rep.to_dict() for name, rep in reports.items()},
                   indent=2), encoding="utf-8")
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
