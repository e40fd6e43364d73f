"""HTTP API tests against the in-process app with a scripted provider."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from tpgpt.service import ServiceConfig, build_runtime, create_app

FIXTURE = Path(__file__).parent / "fixtures" / "service_fixture.json"


@pytest.fixture(scope="module")
def runtime():
    config = ServiceConfig(
        fixture_path=str(FIXTURE),
        dataset_seed=3,
        dataset_routes="I-5",
        dataset_detectors_per_route=2,
        dataset_days=1,
    )
    return build_runtime(config)


@pytest.fixture(scope="module")
def client(runtime):
    return TestClient(create_app(runtime))


def _new_session(client) -> str:
    response = client.post("/sessions")
    assert response.status_code == 201
    session_id = response.json()["session_id"]
    assert session_id
    return session_id


def test_health(client):
    assert client.get("/health").json() == {"status": "ok"}


def test_full_scripted_round_trip(client):
    session_id = _new_session(client)
    response = client.post(f"/sessions/{session_id}/messages",
                           json={"question": "How many detectors per route?"})
    assert response.status_code == 200
    body = response.json()
    fixture = json.loads(FIXTURE.read_text())
    interpretation = json.loads(fixture[-1]["response_text"])["action_input"]
    assert body["answer"] == interpretation
    assert body["outcome"] == "Answered"

    trace = client.get(f"/traces/{body['trace_id']}")
    assert trace.status_code == 200
    doc = trace.json()
    assert doc["final_answer"] == interpretation
    assert len(doc["sql_attempts"]) == 1

    transcript = client.get(f"/sessions/{session_id}").json()
    assert [t["speaker"] for t in transcript["turns"]] == ["user", "assistant"]

    status = client.get(f"/sessions/{session_id}/status").json()
    assert status == {"in_flight": False, "last_trace_id": body["trace_id"]}


def test_unknown_session_and_trace_404(client):
    assert client.get("/sessions/nope").status_code == 404
    assert client.post("/sessions/nope/messages",
                       json={"question": "q"}).status_code == 404
    assert client.get("/traces/nope").status_code == 404
    assert client.get("/sessions/nope/status").status_code == 404


def test_in_flight_contention_gets_409(client, runtime):
    session_id = _new_session(client)
    lock = runtime.session_locks[session_id]
    assert lock.acquire(blocking=False)
    try:
        response = client.post(f"/sessions/{session_id}/messages",
                               json={"question": "q"})
        assert response.status_code == 409
    finally:
        lock.release()
    # released: the session answers normally again
    ok = client.post(f"/sessions/{session_id}/messages",
                     json={"question": "q"})
    assert ok.status_code == 200


def test_schema_endpoint_lists_tables(client):
    doc = client.get("/schema").json()
    assert "dbo.MinuteDataNW" in doc["tables"]
    assert len(doc["tables"]) == 6


def test_reload_templates(client):
    assert client.post("/admin/reload-templates").json() == {"reloaded": True}


def test_provider_fault_is_503(tmp_path):
    empty_fixture = tmp_path / "empty.json"
    empty_fixture.write_text("[]")
    config = ServiceConfig(
        fixture_path=str(empty_fixture),
        dataset_seed=3, dataset_routes="I-5",
        dataset_detectors_per_route=2, dataset_days=1)
    client = TestClient(create_app(build_runtime(config)))
    session_id = _new_session(client)
    response = client.post(f"/sessions/{session_id}/messages",
                           json={"question": "q"})
    assert response.status_code == 503


def test_bearer_token_auth(tmp_path):
    config = ServiceConfig(
        fixture_path=str(FIXTURE),
        dataset_seed=3, dataset_routes="I-5",
        dataset_detectors_per_route=2, dataset_days=1,
        auth_token="sekrit")
    client = TestClient(create_app(build_runtime(config)))
    assert client.post("/sessions").status_code == 401
    assert client.get("/health").status_code == 200  # exempt
    ok = client.post("/sessions", headers={"Authorization": "Bearer sekrit"})
    assert ok.status_code == 201


def test_config_file_parsing(tmp_path):
    path = tmp_path / "service.conf"
    path.write_text(
        "# demo config\n"
        "host=0.0.0.0\n"
        "port=9001\n"
        f"fixture_path={FIXTURE}\n"
        "dataset_seed=3\n"
        "dataset_routes=I-5\n"
        "dataset_detectors_per_route=2\n"
        "dataset_days=1\n"
        "max_iterations=4\n"
        "timeout_s=2.5\n"
        "prompt_on=true\n"
        "multiagent_on=false\n")
    config = ServiceConfig.from_file(path)
    assert config.port == 9001
    assert config.max_iterations == 4
    assert config.timeout_s == 2.5
    assert config.multiagent_on is False
    assert config.orchestrator_config().flags.multiagent_on is False


def test_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "bad.conf"
    path.write_text("nonsense=1\n")
    with pytest.raises(ValueError):
        ServiceConfig.from_file(path)


def test_config_requires_provider_mode():
    with pytest.raises(ValueError):
        ServiceConfig(provider="scripted", fixture_path=None)
    with pytest.raises(ValueError):
        ServiceConfig(provider="weird")
