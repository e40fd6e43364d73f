#!/usr/bin/env python3
"""Regenerate the benchmark task file for a seed and sanity-check digests."""

from __future__ import annotations

import argparse
from collections import Counter
from pathlib import Path

from tpgpt.bench import build_tasks, reference_dataset, save_tasks_jsonl
from tpgpt.gateway import TrafficStore


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--out", type=Path, default=Path("tasks.jsonl"))
    args = parser.parse_args()

    dataset = reference_dataset(args.seed)
    store = TrafficStore()
    store.load_dataset(dataset)
    tasks = build_tasks(dataset, store)
    save_tasks_jsonl(tasks, args.out)

    by_tag = Counter(task.scenario_tag.value for task in tasks)
    print(f"wrote {len(tasks)} tasks to {args.out}")
    for tag, count in sorted(by_tag.items()):
        print(f"  {tag}: {count}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
