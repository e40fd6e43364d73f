"""Chat-completion and embedding providers behind one small contract.

Two chat providers: a deterministic scripted provider that replays a
fixture transcript (the workhorse for tests and offline demos), and a
live HTTP provider speaking the standard chat-completions JSON protocol.
Embeddings default to a deterministic local hashing scheme so retrieval
is reproducible without any network.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import re
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple

DEFAULT_EMBEDDING_DIM = 256

ENV_API_KEY = "TPGPT_LLM_API_KEY"
ENV_BASE_URL = "TPGPT_LLM_BASE_URL"
ENV_MODEL = "TPGPT_LLM_MODEL"


class ProviderError(Exception):
    """Base class for provider faults."""


class ProviderUnavailable(ProviderError):
    """The backing service cannot be reached or keeps failing."""


class ScriptExhausted(ProviderError):
    """The scripted provider ran past the end of its fixture."""


class ScriptMismatch(ProviderError):
    """A fixture entry expected a different last-message role."""


class ContextOverflow(ProviderError):
    """The assembled prompt exceeds the provider's context limit."""


class EmptyTextError(ValueError):
    """embed() was called with empty text."""


def estimate_tokens(text: str) -> int:
    """Cheap, deterministic token estimate (4 chars per token)."""
    return max(1, len(text) // 4) if text else 0


@dataclass(frozen=True)
class ChatMessage:
    role: str  # system | user | assistant
    content: str

    def __post_init__(self) -> None:
        if self.role not in ("system", "user", "assistant"):
            raise ValueError(f"unknown role {self.role!r}")


@dataclass(frozen=True)
class ChatRequest:
    messages: Tuple[ChatMessage, ...]
    temperature: float = 0.0
    max_output_tokens: int = 1024

    def __post_init__(self) -> None:
        if not self.messages:
            raise ValueError("a chat request needs at least one message")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")

    @property
    def prompt_tokens(self) -> int:
        return sum(estimate_tokens(m.content) for m in self.messages)


@dataclass(frozen=True)
class ChatResponse:
    content: str
    finish_reason: str  # stop | length | error
    prompt_tokens: int = 0
    output_tokens: int = 0


@dataclass(frozen=True)
class EmbeddingVector:
    values: Tuple[float, ...]

    @property
    def dimension(self) -> int:
        return len(self.values)

    def norm(self) -> float:
        return math.sqrt(sum(v * v for v in self.values))


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    if a.dimension != b.dimension:
        raise ValueError("embedding dimensions differ")
    return sum(x * y for x, y in zip(a.values, b.values))


class ScriptedProvider:
    """Replays a fixture transcript: JSON list of {expect_role, response_text}.

    Responses are returned by cursor position after checking that the role
    of the request's last message matches what the fixture expects, which
    keeps a drifting pipeline from silently consuming the wrong entries.
    One provider instance serves one consumer; make a fresh one per run.
    """

    def __init__(self, entries: Sequence[Tuple[str, str]],
                 context_limit: Optional[int] = None):
        self._entries = list(entries)
        self._cursor = 0
        self._context_limit = context_limit

    @classmethod
    def from_file(cls, path: str | Path,
                  context_limit: Optional[int] = None) -> "ScriptedProvider":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls.from_list(doc, context_limit=context_limit)

    @classmethod
    def from_list(cls, doc: Sequence[dict],
                  context_limit: Optional[int] = None) -> "ScriptedProvider":
        entries = [(item["expect_role"], item["response_text"]) for item in doc]
        return cls(entries, context_limit=context_limit)

    @property
    def remaining(self) -> int:
        return len(self._entries) - self._cursor

    def complete(self, request: ChatRequest) -> ChatResponse:
        if self._context_limit is not None and request.prompt_tokens > self._context_limit:
            raise ContextOverflow(
                f"prompt of ~{request.prompt_tokens} tokens exceeds the "
                f"{self._context_limit}-token limit")
        if self._cursor >= len(self._entries):
            raise ScriptExhausted(
                f"fixture exhausted after {len(self._entries)} entries")
        expect_role, response_text = self._entries[self._cursor]
        last_role = request.messages[-1].role
        if last_role != expect_role:
            raise ScriptMismatch(
                f"fixture entry {self._cursor} expects a {expect_role!r} message, "
                f"got {last_role!r}")
        self._cursor += 1
        return ChatResponse(
            content=response_text,
            finish_reason="stop",
            prompt_tokens=request.prompt_tokens,
            output_tokens=estimate_tokens(response_text),
        )


class LiveChatProvider:
    """Provider-standard chat-completions over HTTP with bounded retries."""

    MAX_ATTEMPTS = 3
    BACKOFF_S = 0.5

    def __init__(self, base_url: Optional[str] = None, api_key: Optional[str] = None,
                 model: Optional[str] = None, timeout_s: float = 60.0):
        self.base_url = (base_url or os.environ.get(ENV_BASE_URL, "")).rstrip("/")
        self.api_key = api_key or os.environ.get(ENV_API_KEY, "")
        self.model = model or os.environ.get(ENV_MODEL, "")
        self.timeout_s = timeout_s
        if not self.base_url or not self.model:
            raise ProviderUnavailable(
                f"live provider needs {ENV_BASE_URL} and {ENV_MODEL}")

    def complete(self, request: ChatRequest) -> ChatResponse:
        import requests

        payload = {
            "model": self.model,
            "messages": [{"role": m.role, "content": m.content}
                         for m in request.messages],
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
        }
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        last_error: Exception | None = None
        for attempt in range(self.MAX_ATTEMPTS):
            try:
                resp = requests.post(
                    f"{self.base_url}/chat/completions", json=payload,
                    headers=headers, timeout=self.timeout_s)
                if resp.status_code >= 500:
                    last_error = ProviderUnavailable(
                        f"server error {resp.status_code}")
                elif resp.status_code == 400 and "context" in resp.text.lower():
                    raise ContextOverflow(resp.text[:500])
                elif resp.status_code >= 400:
                    raise ProviderUnavailable(
                        f"request rejected ({resp.status_code}): {resp.text[:500]}")
                else:
                    doc = resp.json()
                    choice = doc["choices"][0]
                    usage = doc.get("usage", {})
                    return ChatResponse(
                        content=choice["message"]["content"] or "",
                        finish_reason=choice.get("finish_reason", "stop"),
                        prompt_tokens=usage.get("prompt_tokens", 0),
                        output_tokens=usage.get("completion_tokens", 0),
                    )
            except (ContextOverflow, ProviderUnavailable):
                raise
            except Exception as exc:  # connection errors, malformed payloads
                last_error = exc
            time.sleep(self.BACKOFF_S * (2 ** attempt))
        raise ProviderUnavailable(f"gave up after {self.MAX_ATTEMPTS} attempts: "
                                  f"{last_error}")


_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")


class HashingEmbedder:
    """Deterministic bag-of-words embedding: hash tokens into a fixed-size
    vector and L2-normalize.  Adequate wherever only relative similarity
    matters; no network, no model weights, stable across platforms."""

    def __init__(self, dimension: int = DEFAULT_EMBEDDING_DIM):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.dimension = dimension

    def _slot(self, token: str) -> int:
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "big") % self.dimension

    def embed(self, text: str) -> EmbeddingVector:
        if not text:
            raise EmptyTextError("cannot embed empty text")
        tokens = [t for t in _TOKEN_SPLIT.split(text.lower()) if t]
        if not tokens:
            tokens = [text]  # no alphanumeric content: hash the raw text
        counts = [0.0] * self.dimension
        for token in tokens:
            counts[self._slot(token)] += 1.0
        norm = math.sqrt(sum(c * c for c in counts))
        return EmbeddingVector(tuple(c / norm for c in counts))


class LiveEmbedder:
    """Embeddings from the provider's /embeddings endpoint, L2-normalized."""

    def __init__(self, base_url: Optional[str] = None, api_key: Optional[str] = None,
                 model: Optional[str] = None, timeout_s: float = 60.0):
        self.base_url = (base_url or os.environ.get(ENV_BASE_URL, "")).rstrip("/")
        self.api_key = api_key or os.environ.get(ENV_API_KEY, "")
        self.model = model or os.environ.get(ENV_MODEL, "")
        self.timeout_s = timeout_s
        if not self.base_url or not self.model:
            raise ProviderUnavailable(
                f"live embedder needs {ENV_BASE_URL} and {ENV_MODEL}")

    def embed(self, text: str) -> EmbeddingVector:
        import requests

        if not text:
            raise EmptyTextError("cannot embed empty text")
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        try:
            resp = requests.post(
                f"{self.base_url}/embeddings",
                json={"model": self.model, "input": text},
                headers=headers, timeout=self.timeout_s)
            resp.raise_for_status()
            values = resp.json()["data"][0]["embedding"]
        except Exception as exc:
            raise ProviderUnavailable(f"embedding request failed: {exc}") from exc
        norm = math.sqrt(sum(v * v for v in values)) or 1.0
        return EmbeddingVector(tuple(v / norm for v in values))
