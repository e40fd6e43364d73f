"""Provider contract tests: scripted determinism, embedding guarantees."""

from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpgpt.llm import (
    ChatMessage,
    ChatRequest,
    ContextOverflow,
    EmptyTextError,
    HashingEmbedder,
    LiveChatProvider,
    ProviderUnavailable,
    ScriptExhausted,
    ScriptMismatch,
    ScriptedProvider,
    cosine,
)


def _request(text: str, role: str = "user") -> ChatRequest:
    return ChatRequest(messages=(ChatMessage(role, text),))


FIXTURE = [
    {"expect_role": "user", "response_text": "first"},
    {"expect_role": "user", "response_text": "second"},
    {"expect_role": "user", "response_text": "third"},
]


class TestScriptedProvider:
    def test_replays_in_order(self):
        provider = ScriptedProvider.from_list(FIXTURE)
        assert provider.complete(_request("a")).content == "first"
        assert provider.complete(_request("b")).content == "second"
        assert provider.remaining == 1

    def test_exhaustion(self):
        provider = ScriptedProvider.from_list(FIXTURE)
        for _ in range(3):
            provider.complete(_request("x"))
        with pytest.raises(ScriptExhausted):
            provider.complete(_request("x"))

    def test_role_mismatch(self):
        provider = ScriptedProvider.from_list(FIXTURE)
        with pytest.raises(ScriptMismatch):
            provider.complete(ChatRequest(messages=(
                ChatMessage("user", "hi"), ChatMessage("assistant", "ok"))))

    def test_two_runs_identical(self):
        transcripts = []
        for _ in range(2):
            provider = ScriptedProvider.from_list(FIXTURE)
            transcripts.append([provider.complete(_request(f"q{i}")).content
                                for i in range(3)])
        assert transcripts[0] == transcripts[1]

    def test_from_file(self, tmp_path):
        path = tmp_path / "fixture.json"
        path.write_text(json.dumps(FIXTURE))
        provider = ScriptedProvider.from_file(path)
        assert provider.complete(_request("a")).content == "first"

    def test_context_overflow(self):
        provider = ScriptedProvider.from_list(FIXTURE, context_limit=4)
        with pytest.raises(ContextOverflow):
            provider.complete(_request("x" * 100))

    def test_usage_accounting(self):
        provider = ScriptedProvider.from_list(FIXTURE)
        response = provider.complete(_request("abcdefgh"))
        assert response.prompt_tokens == 2
        assert response.output_tokens == 1
        assert response.finish_reason == "stop"


class TestHashingEmbedder:
    def test_deterministic(self):
        emb = HashingEmbedder()
        assert emb.embed("traffic on I-5") == emb.embed("traffic on I-5")

    def test_unit_norm(self):
        emb = HashingEmbedder()
        for text in ("a", "traffic volume on SR-520", "???", "x " * 300):
            assert emb.embed(text).norm() == pytest.approx(1.0, abs=1e-9)

    def test_empty_rejected(self):
        with pytest.raises(EmptyTextError):
            HashingEmbedder().embed("")

    def test_similarity_ordering(self):
        emb = HashingEmbedder()
        base = emb.embed("traffic on I-5")
        near = cosine(base, emb.embed("traffic on I-5 today"))
        far = cosine(base, emb.embed("carpool emissions"))
        assert near > far

    def test_dimension_fixed(self):
        emb = HashingEmbedder(dimension=64)
        assert emb.embed("hello world").dimension == 64


@settings(max_examples=200, deadline=None)
@given(text=st.text(min_size=1, max_size=80))
def test_embeddings_always_unit_norm(text):
    emb = HashingEmbedder(dimension=32)
    vector = emb.embed(text)
    assert vector.norm() == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(a=st.text(min_size=1, max_size=40), b=st.text(min_size=1, max_size=40))
def test_cosine_bounded_for_local_fallback(a, b):
    emb = HashingEmbedder(dimension=32)
    value = cosine(emb.embed(a), emb.embed(b))
    assert -1e-9 <= value <= 1.0 + 1e-9


class TestLiveProvider:
    def test_requires_configuration(self, monkeypatch):
        monkeypatch.delenv("TPGPT_LLM_BASE_URL", raising=False)
        monkeypatch.delenv("TPGPT_LLM_MODEL", raising=False)
        with pytest.raises(ProviderUnavailable):
            LiveChatProvider()

    def test_parses_standard_payload(self, monkeypatch):
        provider = LiveChatProvider(base_url="http://llm.test/v1",
                                    api_key="k", model="m")

        class FakeResponse:
            status_code = 200
            text = ""

            @staticmethod
            def json():
                return {
                    "choices": [{"message": {"content": "hi"},
                                 "finish_reason": "stop"}],
                    "usage": {"prompt_tokens": 5, "completion_tokens": 2},
                }

        calls = {}

        def fake_post(url, json=None, headers=None, timeout=None):
            calls["url"] = url
            calls["payload"] = json
            return FakeResponse()

        monkeypatch.setattr("requests.post", fake_post)
        response = provider.complete(_request("hello"))
        assert response.content == "hi"
        assert calls["url"] == "http://llm.test/v1/chat/completions"
        assert calls["payload"]["model"] == "m"

    def test_retries_then_gives_up(self, monkeypatch):
        provider = LiveChatProvider(base_url="http://llm.test/v1",
                                    api_key="k", model="m")
        provider.BACKOFF_S = 0.0
        attempts = {"n": 0}

        def always_down(*args, **kwargs):
            attempts["n"] += 1
            raise OSError("connection refused")

        monkeypatch.setattr("requests.post", always_down)
        with pytest.raises(ProviderUnavailable):
            provider.complete(_request("hello"))
        assert attempts["n"] == 3
