"""Per-session dialogue history with relevance-filtered recall.

Sessions are backed by two side tables in an embedded sqlite database --
in-memory by default, file-backed when a path is given so a service
restart keeps its history.  Only the parts of a session relevant to the
question at hand are recalled: top-m prior user turns by cosine
similarity, each paired with its answer, replayed in chronological order.
"""

from __future__ import annotations

import json
import sqlite3
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from .llm import EmbeddingVector, cosine


@dataclass(frozen=True)
class ChatTurn:
    turn_id: int
    speaker: str  # user | assistant
    text: str
    instant: datetime
    embedding: Optional[EmbeddingVector] = None  # user turns only


@dataclass
class ChatSession:
    session_id: str
    created_at: datetime
    turns: List[ChatTurn] = field(default_factory=list)

    def pairs(self) -> List[Tuple[ChatTurn, ChatTurn]]:
        """(user, assistant) turn pairs in chronological order."""
        return [(self.turns[i], self.turns[i + 1])
                for i in range(0, len(self.turns) - 1, 2)]


class MemoryStore:
    """Session registry; single-writer per session, isolated across sessions."""

    def __init__(self, embedder, path: "str | Path | None" = None,
                 clock: Optional[Callable[[], datetime]] = None):
        self._embedder = embedder
        self._clock = clock or (lambda: datetime.now(timezone.utc))
        self._lock = threading.RLock()
        self._sessions: Dict[str, ChatSession] = {}
        self._conn = sqlite3.connect(str(path) if path else ":memory:",
                                     check_same_thread=False)
        self._conn.execute(
            "CREATE TABLE IF NOT EXISTS chat_sessions ("
            "session_id TEXT PRIMARY KEY, created_at TEXT)")
        self._conn.execute(
            "CREATE TABLE IF NOT EXISTS chat_turns ("
            "session_id TEXT, turn_id INTEGER, speaker TEXT, text TEXT, "
            "instant TEXT, embedding TEXT, "
            "PRIMARY KEY (session_id, turn_id))")
        self._conn.commit()
        self._restore()

    def _restore(self) -> None:
        for session_id, created_at in self._conn.execute(
                "SELECT session_id, created_at FROM chat_sessions"):
            session = ChatSession(session_id, datetime.fromisoformat(created_at))
            for turn_id, speaker, text, instant, emb in self._conn.execute(
                    "SELECT turn_id, speaker, text, instant, embedding "
                    "FROM chat_turns WHERE session_id = ? ORDER BY turn_id",
                    (session_id,)):
                embedding = (EmbeddingVector(tuple(json.loads(emb)))
                             if emb else None)
                session.turns.append(ChatTurn(
                    turn_id, speaker, text, datetime.fromisoformat(instant),
                    embedding))
            self._sessions[session_id] = session

    # -- session lifecycle -----------------------------------------------------
    def create_session(self, session_id: Optional[str] = None) -> ChatSession:
        with self._lock:
            session_id = session_id or uuid.uuid4().hex
            if session_id in self._sessions:
                raise ValueError(f"session {session_id!r} already exists")
            session = ChatSession(session_id, self._clock())
            self._sessions[session_id] = session
            self._conn.execute(
                "INSERT INTO chat_sessions VALUES (?, ?)",
                (session_id, session.created_at.isoformat()))
            self._conn.commit()
            return session

    def get_session(self, session_id: str) -> Optional[ChatSession]:
        return self._sessions.get(session_id)

    def session_ids(self) -> List[str]:
        return list(self._sessions)

    # -- the memory contract ------------------------------------------------------
    def commit(self, session: ChatSession, question: str, answer: str) -> None:
        """Append one (user, assistant) turn pair; embeds the user turn."""
        with self._lock:
            next_id = session.turns[-1].turn_id + 1 if session.turns else 1
            user_turn = ChatTurn(
                turn_id=next_id, speaker="user", text=question,
                instant=self._clock(),
                embedding=self._embedder.embed(question) if question else None)
            assistant_turn = ChatTurn(
                turn_id=next_id + 1, speaker="assistant", text=answer,
                instant=self._clock())
            session.turns.extend([user_turn, assistant_turn])
            self._conn.executemany(
                "INSERT INTO chat_turns VALUES (?, ?, ?, ?, ?, ?)",
                [
                    (session.session_id, user_turn.turn_id, "user", question,
                     user_turn.instant.isoformat(),
                     json.dumps(list(user_turn.embedding.values))
                     if user_turn.embedding else None),
                    (session.session_id, assistant_turn.turn_id, "assistant",
                     answer, assistant_turn.instant.isoformat(), None),
                ])
            self._conn.commit()

    def recall(self, session: ChatSession, question: str,
               m: int) -> List[Tuple[ChatTurn, ChatTurn]]:
        """Top-m past turn pairs most similar to the question, oldest first."""
        if m < 0:
            raise ValueError("m must be >= 0")
        pairs = session.pairs()
        if m == 0 or not pairs:
            return []
        query = self._embedder.embed(question)
        scored = sorted(
            ((cosine(query, user.embedding), -user.turn_id, (user, answer))
             for user, answer in pairs if user.embedding is not None),
            key=lambda item: (-item[0], -item[1]),
        )
        chosen = [item[2] for item in scored[:m]]
        chosen.sort(key=lambda pair: pair[0].turn_id)
        return chosen

    # -- export ---------------------------------------------------------------
    def export_transcript(self, session: ChatSession) -> dict:
        return {
            "session_id": session.session_id,
            "created_at": session.created_at.isoformat(),
            "turns": [
                {
                    "turn_id": turn.turn_id,
                    "speaker": turn.speaker,
                    "text": turn.text,
                    "instant": turn.instant.isoformat(),
                }
                for turn in session.turns
            ],
        }
