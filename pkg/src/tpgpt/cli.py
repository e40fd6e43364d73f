"""Operator command line: generate, ingest, ask, bench, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import (
    build_tasks,
    format_report_table,
    load_tasks_jsonl,
    make_scripted_runner,
    reference_dataset,
    run_ablation,
    run_benchmark,
    save_tasks_jsonl,
)
from .fewshot import starter_repository
from .gateway import SchemaMismatchError, TrafficStore
from .llm import HashingEmbedder, LiveChatProvider, ProviderError, ScriptedProvider
from .memory import MemoryStore
from .orchestrator import FeatureFlags, Orchestrator, OrchestratorConfig
from .prompts import TemplateSet
from .service import ServiceConfig, serve
from .synth import generate_synthetic_network


def _parse_routes(raw: str) -> list:
    routes = [r.strip() for r in raw.split(",") if r.strip()]
    if not routes:
        raise argparse.ArgumentTypeError("need at least one route label")
    return routes


def _add_dataset_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--routes", type=_parse_routes,
                        default=["I-5", "I-405", "SR-99", "SR-520"])
    parser.add_argument("--detectors-per-route", type=int, default=4)
    parser.add_argument("--days", type=int, default=7)
    parser.add_argument("--csv", default=None,
                        help="load this CSV directory instead of synthesizing")


def _load_store(args) -> TrafficStore:
    store = TrafficStore()
    if args.csv:
        store.load_dataset(args.csv)
    else:
        store.load_dataset(generate_synthetic_network(
            seed=args.seed, routes=args.routes,
            detectors_per_route=args.detectors_per_route, days=args.days))
    return store


def cmd_generate(args) -> int:
    dataset = generate_synthetic_network(
        seed=args.seed, routes=args.routes,
        detectors_per_route=args.detectors_per_route, days=args.days,
        minutes_step=args.minutes_step)
    dataset.to_csv_dir(args.out)
    print(f"wrote {len(dataset.observations)} observations and "
          f"{len(dataset.index_records)} index rows to {args.out}")
    return 0


def cmd_ingest(args) -> int:
    store = TrafficStore()
    try:
        store.load_dataset(args.csv)
    except SchemaMismatchError as exc:
        print(f"ingest failed: {exc}", file=sys.stderr)
        return 1
    for table, count in store.table_counts().items():
        print(f"{table}: {count} rows")
    return 0


def cmd_ask(args) -> int:
    store = _load_store(args)
    embedder = HashingEmbedder()
    templates = TemplateSet.load(store.catalog, args.template_dir)
    repository = starter_repository(embedder, store.catalog)
    memory = MemoryStore(embedder)
    if args.live:
        provider = LiveChatProvider()
    else:
        if not args.fixture:
            print("ask needs --fixture PATH (or --live)", file=sys.stderr)
            return 2
        provider = ScriptedProvider.from_file(args.fixture)
    orch = Orchestrator(store, provider, embedder, templates, repository, memory)
    session = memory.create_session()
    config = OrchestratorConfig(
        max_iterations=args.max_iterations,
        flags=FeatureFlags(prompt_on=not args.no_prompt,
                           fewshot_on=not args.no_fewshot,
                           multiagent_on=not args.single_agent))
    try:
        trace = orch.run(args.question, session, config)
    except ProviderError as exc:
        print(f"provider fault: {exc}", file=sys.stderr)
        return 1
    trace_path = Path(args.trace_out)
    trace_path.write_text(trace.to_json(), encoding="utf-8")
    print(trace.final_answer)
    print(f"[outcome={trace.outcome.value} iterations={trace.iterations_used} "
          f"trace={trace_path}]")
    return 0 if trace.outcome.value != "Failed" else 1


def cmd_bench(args) -> int:
    if args.csv or args.tasks:
        store = _load_store(args)
        if not args.tasks:
            print("bench with --csv also needs --tasks", file=sys.stderr)
            return 2
        tasks = load_tasks_jsonl(args.tasks)
    else:
        dataset = reference_dataset(args.seed) if (
            args.seed == 7 and args.routes == ["I-5", "I-405", "SR-99", "SR-520"]
            and args.detectors_per_route == 4 and args.days == 7
        ) else generate_synthetic_network(
            seed=args.seed, routes=args.routes,
            detectors_per_route=args.detectors_per_route, days=args.days)
        store = TrafficStore()
        store.load_dataset(dataset)
        tasks = build_tasks(dataset, store)
    if args.save_tasks:
        save_tasks_jsonl(tasks, args.save_tasks)
        print(f"saved {len(tasks)} tasks to {args.save_tasks}")

    embedder = HashingEmbedder()
    templates = TemplateSet.load(store.catalog, args.template_dir)
    repository = starter_repository(embedder, store.catalog)

    def factory(flags: FeatureFlags):
        config = OrchestratorConfig(flags=flags)
        return make_scripted_runner(store, embedder, templates, repository, config)

    if args.ablation:
        reports = run_ablation(tasks, factory)
        print(format_report_table(list(reports.values())))
        report_doc = {name: rep.to_dict() for name, rep in reports.items()}
    else:
        report = run_benchmark(tasks, factory(FeatureFlags()), label="oracle-replay")
        print(format_report_table([report]))
        report_doc = report.to_dict()
    if args.out:
        Path(args.out).write_text(json.dumps(report_doc, indent=2),
                                  encoding="utf-8")
        print(f"wrote report to {args.out}")
    return 0


def cmd_serve(args) -> int:
    if args.config:
        config = ServiceConfig.from_file(args.config)
    else:
        if not args.fixture:
            print("serve needs --config FILE or --fixture PATH", file=sys.stderr)
            return 2
        config = ServiceConfig(host=args.host, port=args.port,
                               fixture_path=args.fixture)
    serve(config)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tpgpt",
        description="Traffic-analytics chatbot engine and benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write a synthetic dataset as CSVs")
    _add_dataset_args(p_gen)
    p_gen.add_argument("--minutes-step", type=int, default=1)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_generate)

    p_ing = sub.add_parser("ingest", help="load a CSV directory and report counts")
    p_ing.add_argument("--csv", required=True)
    p_ing.set_defaults(func=cmd_ingest)

    p_ask = sub.add_parser("ask", help="answer one question end to end")
    _add_dataset_args(p_ask)
    p_ask.add_argument("--question", required=True)
    p_ask.add_argument("--fixture", default=None,
                       help="scripted provider transcript (JSON)")
    p_ask.add_argument("--live", action="store_true")
    p_ask.add_argument("--template-dir", default=None)
    p_ask.add_argument("--max-iterations", type=int, default=5)
    p_ask.add_argument("--no-prompt", action="store_true")
    p_ask.add_argument("--no-fewshot", action="store_true")
    p_ask.add_argument("--single-agent", action="store_true")
    p_ask.add_argument("--trace-out", default="trace.json")
    p_ask.set_defaults(func=cmd_ask)

    p_bench = sub.add_parser("bench", help="run the benchmark (oracle replay)")
    _add_dataset_args(p_bench)
    p_bench.add_argument("--tasks", default=None, help="task JSONL to load")
    p_bench.add_argument("--save-tasks", default=None)
    p_bench.add_argument("--template-dir", default=None)
    p_bench.add_argument("--ablation", action="store_true",
                         help="run the four feature-toggle variants")
    p_bench.add_argument("--out", default=None, help="write the JSON report here")
    p_bench.set_defaults(func=cmd_bench)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--config", default=None)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.add_argument("--fixture", default=None)
    p_serve.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
