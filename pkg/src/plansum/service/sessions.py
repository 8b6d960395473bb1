"""In-memory session state with TTL eviction and per-session FIFO locks."""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field

from plansum.engine import GenerationResult, ModelInput
from plansum.retrieval import Corpus


class UnknownSession(KeyError):
    """Session id does not exist or has expired."""

    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return self.args[0] if self.args else ""


@dataclass
class Session:
    """A query bound to its retrieved corpus and the latest generation result.

    ``corpus`` and ``model_input`` never change after creation; only
    ``last_result`` and ``last_used`` do, under ``lock``.
    """

    session_id: str
    query: str
    corpus: Corpus
    model_input: ModelInput
    created_at: float
    last_used: float
    last_result: GenerationResult | None = None
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


class SessionStore:
    """Thread-safe map of live sessions.

    Ids are sequential ("s-1", "s-2", ...) so a replayed request script
    against a fresh server produces identical response bodies. Sessions idle
    past the TTL are evicted lazily on access.
    """

    def __init__(self, ttl_seconds: float = 1800.0):
        self.ttl_seconds = ttl_seconds
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self._counter = 0

    def create(self, query: str, corpus: Corpus, model_input: ModelInput) -> Session:
        now = time.time()
        with self._lock:
            self._evict_expired(now)
            self._counter += 1
            session = Session(
                session_id=f"s-{self._counter}",
                query=query,
                corpus=corpus,
                model_input=model_input,
                created_at=now,
                last_used=now,
            )
            self._sessions[session.session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        now = time.time()
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None or now - session.last_used > self.ttl_seconds:
                self._sessions.pop(session_id, None)
                raise UnknownSession(f"unknown or expired session {session_id!r}")
            session.last_used = now
        return session

    def _evict_expired(self, now: float) -> None:
        expired = [sid for sid, s in self._sessions.items() if now - s.last_used > self.ttl_seconds]
        for sid in expired:
            del self._sessions[sid]

    def __len__(self) -> int:
        with self._lock:
            return len(self._sessions)
