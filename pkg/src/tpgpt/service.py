"""HTTP service: sessions, chat, trace inspection, schema browsing.

Synchronous request/response: a message POST returns when the pipeline
finishes.  One question may be in flight per session (a second concurrent
POST gets 409); distinct sessions run concurrently.  The API returns
answers and bounded result excerpts, never bulk table dumps -- the row cap
is enforced inside the gateway.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel

from .bench import reference_dataset
from .fewshot import ExampleRepository, starter_repository
from .gateway import TrafficStore
from .llm import HashingEmbedder, LiveChatProvider, ProviderError, ScriptedProvider
from .memory import MemoryStore
from .orchestrator import FeatureFlags, Orchestrator, OrchestratorConfig
from .prompts import TemplateSet
from .synth import generate_synthetic_network


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    # dataset: either a CSV directory or synthesis parameters
    dataset_dir: Optional[str] = None
    dataset_seed: int = 7
    dataset_routes: str = "I-5,I-405,SR-99,SR-520"
    dataset_detectors_per_route: int = 4
    dataset_days: int = 7
    # provider: exactly one mode
    provider: str = "scripted"  # scripted | live
    fixture_path: Optional[str] = None
    # assets
    template_dir: Optional[str] = None
    fewshot_path: Optional[str] = None
    sessions_db: Optional[str] = None
    auth_token: Optional[str] = None
    # pipeline knobs
    max_iterations: int = 5
    fewshot_k: int = 3
    memory_m: int = 2
    max_rows: int = 1000
    timeout_s: float = 10.0
    prompt_on: bool = True
    fewshot_on: bool = True
    multiagent_on: bool = True

    def __post_init__(self) -> None:
        if self.provider not in ("scripted", "live"):
            raise ValueError(f"unknown provider mode {self.provider!r}")
        if self.provider == "scripted" and not self.fixture_path:
            raise ValueError("scripted provider mode needs fixture_path")

    def orchestrator_config(self) -> OrchestratorConfig:
        return OrchestratorConfig(
            max_iterations=self.max_iterations,
            fewshot_k=self.fewshot_k,
            memory_m=self.memory_m,
            flags=FeatureFlags(self.prompt_on, self.fewshot_on, self.multiagent_on),
            max_rows=self.max_rows,
            timeout_s=self.timeout_s,
        )

    @classmethod
    def from_file(cls, path: "str | Path") -> "ServiceConfig":
        """Parse the documented KEY=VALUE config format ('#' comments)."""
        values: Dict[str, str] = {}
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line (need KEY=VALUE): {raw!r}")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
        kwargs: Dict[str, object] = {}
        for fld in cls.__dataclass_fields__.values():
            if fld.name not in values:
                continue
            raw_value = values.pop(fld.name)
            if fld.type in ("int", int):
                kwargs[fld.name] = int(raw_value)
            elif fld.type in ("float", float):
                kwargs[fld.name] = float(raw_value)
            elif fld.type in ("bool", bool):
                kwargs[fld.name] = raw_value.lower() in ("1", "true", "yes", "on")
            else:
                kwargs[fld.name] = raw_value
        if values:
            raise ValueError(f"unknown config keys: {sorted(values)}")
        return cls(**kwargs)


class _MessageBody(BaseModel):
    question: str


@dataclass
class ServiceRuntime:
    config: ServiceConfig
    store: TrafficStore
    embedder: HashingEmbedder
    templates: TemplateSet
    repository: ExampleRepository
    memory: MemoryStore
    traces: Dict[str, dict] = field(default_factory=dict)
    last_trace: Dict[str, str] = field(default_factory=dict)
    session_locks: Dict[str, threading.Lock] = field(default_factory=dict)
    live_provider: Optional[LiveChatProvider] = None

    def make_provider(self):
        if self.config.provider == "live":
            if self.live_provider is None:
                self.live_provider = LiveChatProvider()
            return self.live_provider
        # Scripted mode replays the fixture afresh for every message.
        return ScriptedProvider.from_file(self.config.fixture_path)

    def reload_templates(self) -> None:
        self.templates = TemplateSet.load(
            self.store.catalog, self.config.template_dir,
            fewshot_slots=self.config.fewshot_k)


def build_runtime(config: ServiceConfig) -> ServiceRuntime:
    store = TrafficStore()
    if config.dataset_dir:
        store.load_dataset(config.dataset_dir)
    else:
        routes = [r.strip() for r in config.dataset_routes.split(",") if r.strip()]
        if (config.dataset_seed, tuple(routes), config.dataset_detectors_per_route,
                config.dataset_days) == (7, ("I-5", "I-405", "SR-99", "SR-520"), 4, 7):
            dataset = reference_dataset()
        else:
            dataset = generate_synthetic_network(
                seed=config.dataset_seed, routes=routes,
                detectors_per_route=config.dataset_detectors_per_route,
                days=config.dataset_days)
        store.load_dataset(dataset)
    embedder = HashingEmbedder()
    templates = TemplateSet.load(store.catalog, config.template_dir,
                                 fewshot_slots=config.fewshot_k)
    if config.fewshot_path:
        repository = ExampleRepository(embedder, store.catalog)
        repository.load_jsonl(config.fewshot_path)
    else:
        repository = starter_repository(embedder, store.catalog)
    memory = MemoryStore(embedder, path=config.sessions_db)
    return ServiceRuntime(
        config=config, store=store, embedder=embedder, templates=templates,
        repository=repository, memory=memory)


def create_app(runtime: ServiceRuntime) -> FastAPI:
    app = FastAPI(title="traffic-analytics chatbot", version="0.1.0")
    config = runtime.config

    def check_auth(request: Request) -> None:
        if not config.auth_token:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {config.auth_token}":
            raise HTTPException(status_code=401, detail="missing or bad bearer token")

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/sessions", status_code=201, dependencies=[Depends(check_auth)])
    def create_session() -> dict:
        session = runtime.memory.create_session()
        runtime.session_locks[session.session_id] = threading.Lock()
        return {"session_id": session.session_id}

    @app.get("/sessions/{session_id}", dependencies=[Depends(check_auth)])
    def get_session(session_id: str) -> dict:
        session = runtime.memory.get_session(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return runtime.memory.export_transcript(session)

    @app.get("/sessions/{session_id}/status", dependencies=[Depends(check_auth)])
    def session_status(session_id: str) -> dict:
        session = runtime.memory.get_session(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        lock = runtime.session_locks.setdefault(session_id, threading.Lock())
        return {
            "in_flight": lock.locked(),
            "last_trace_id": runtime.last_trace.get(session_id),
        }

    @app.post("/sessions/{session_id}/messages",
              dependencies=[Depends(check_auth)])
    def post_message(session_id: str, body: _MessageBody) -> dict:
        session = runtime.memory.get_session(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        lock = runtime.session_locks.setdefault(session_id, threading.Lock())
        if not lock.acquire(blocking=False):
            raise HTTPException(
                status_code=409,
                detail="a question is already in flight for this session")
        try:
            orch = Orchestrator(
                runtime.store, runtime.make_provider(), runtime.embedder,
                runtime.templates, runtime.repository, runtime.memory)
            try:
                trace = orch.run(body.question, session,
                                 config.orchestrator_config())
            except ProviderError as exc:
                raise HTTPException(status_code=503,
                                    detail=f"provider unavailable: {exc}")
            trace_id = uuid.uuid4().hex
            runtime.traces[trace_id] = trace.to_dict()
            runtime.last_trace[session_id] = trace_id
            return {"answer": trace.final_answer, "trace_id": trace_id,
                    "outcome": trace.outcome.value}
        finally:
            lock.release()

    @app.get("/traces/{trace_id}", dependencies=[Depends(check_auth)])
    def get_trace(trace_id: str) -> dict:
        doc = runtime.traces.get(trace_id)
        if doc is None:
            raise HTTPException(status_code=404, detail="unknown trace")
        return doc

    @app.get("/schema", dependencies=[Depends(check_auth)])
    def get_schema() -> Response:
        return Response(content=runtime.store.catalog.to_json(),
                        media_type="application/json")

    @app.post("/admin/reload-templates", dependencies=[Depends(check_auth)])
    def reload_templates() -> dict:
        runtime.reload_templates()
        return {"reloaded": True}

    @app.exception_handler(ProviderError)
    def provider_error_handler(_request: Request, exc: ProviderError):
        return JSONResponse(status_code=503,
                            content={"detail": f"provider unavailable: {exc}"})

    return app


def serve(config: ServiceConfig) -> None:
    """Build the runtime and block serving HTTP."""
    import uvicorn

    runtime = build_runtime(config)
    app = create_app(runtime)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
