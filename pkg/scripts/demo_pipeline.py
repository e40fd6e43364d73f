#!/usr/bin/env python3
"""Replay one scripted end-to-end scenario and pretty-print the scratchpad.

Handy for eyeballing what each agent contributes at every step without a
live model. Scenario files live in tests/fixtures/scenarios/.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from tpgpt.bench import reference_dataset
from tpgpt.fewshot import starter_repository
from tpgpt.gateway import TrafficStore
from tpgpt.llm import HashingEmbedder, ScriptedProvider
from tpgpt.memory import MemoryStore
from tpgpt.orchestrator import FeatureFlags, Orchestrator, OrchestratorConfig
from tpgpt.prompts import TemplateSet

SCENARIOS = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "scenarios"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("scenario", nargs="?", default="02_error_injection",
                        help="scenario file stem (default: 02_error_injection)")
    args = parser.parse_args()

    path = SCENARIOS / f"{args.scenario}.json"
    if not path.exists():
        options = ", ".join(sorted(p.stem for p in SCENARIOS.glob("*.json")))
        print(f"no scenario {args.scenario!r}; pick one of: {options}",
              file=sys.stderr)
        return 2
    doc = json.loads(path.read_text(encoding="utf-8"))

    print("loading reference dataset (seed 7) ...")
    store = TrafficStore()
    store.load_dataset(reference_dataset())
    embedder = HashingEmbedder()
    templates = TemplateSet.load(store.catalog)
    repository = starter_repository(embedder, store.catalog)
    memory = MemoryStore(embedder)
    session = memory.create_session()
    for pre in doc.get("session_setup", []):
        memory.commit(session, pre["question"], pre["answer"])

    transcript = [{"expect_role": e["expect_role"],
                   "response_text": e.get("response_text",
                                          json.dumps(e.get("response")))}
                  for e in doc["transcript"]]
    raw = dict(doc.get("config", {}))
    flags = FeatureFlags(prompt_on=raw.pop("prompt_on", True),
                         fewshot_on=raw.pop("fewshot_on", True),
                         multiagent_on=raw.pop("multiagent_on", True))
    config = OrchestratorConfig(flags=flags, **raw)
    orch = Orchestrator(store, ScriptedProvider.from_list(transcript), embedder,
                        templates, repository, memory)

    print(f"question: {doc['question']}\n")
    trace = orch.run(doc["question"], session, config)
    for entry in trace.scratchpad.entries:
        print(f"--- step {entry.seq}: {entry.agent_role.value} / {entry.kind.value}")
        print(entry.content)
        print()
    print(f"outcome: {trace.outcome.value}  iterations: {trace.iterations_used}")
    print(f"answer:  {trace.final_answer}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
