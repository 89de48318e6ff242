"""Blind A/B sessions pairing the lexical baseline against an analogical
algorithm.

A session freezes one comparison: both engines run once, each list is cut
to its top ``SESSION_LIST_SIZE`` entries, and the two are interleaved into
a single presentation order. Engine tags stay server-side; the client view
carries papers and their segment texts only, so a voter cannot tell which
engine produced an item.

Session ids are content-derived (seed paper, config, interleave seed), so
re-creating a session with the same inputs is a no-op that returns the
stored one. That makes creation idempotent and client payloads
reproducible.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
import threading
from dataclasses import dataclass

from .corpus import Aspect, CorpusIndex, PaperRecord, iter_segments
from .errors import SessionError
from .evaluation import Engine, interleave_results
from .ranking import SearchConfig, lexical_baseline_search, run_search

# each engine contributes at most this many results to a session
SESSION_LIST_SIZE = 10


@dataclass(frozen=True)
class AbSession:
    """Server-side record of one blind comparison."""

    session_id: str
    test_id: int
    seed_paper_id: str
    config: SearchConfig
    seed: int
    interleaved: tuple[tuple[str, Engine], ...]
    created_at: float
    baseline_only: bool = False
    closed: bool = False

    def engine_for(self, paper_id: str) -> Engine:
        for pid, engine in self.interleaved:
            if pid == paper_id:
                return engine
        raise SessionError(
            f"paper {paper_id!r} is not part of session {self.session_id}"
        )


def session_id_for(seed_paper_id: str, config: SearchConfig, seed: int) -> str:
    """Deterministic id: same inputs always name the same session."""
    payload = json.dumps(
        {"seed_paper_id": seed_paper_id, "config": config.to_dict(), "seed": seed},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def create_ab_session(
    index: CorpusIndex,
    seed_paper_id: str,
    config: SearchConfig,
    seed: int,
    created_at: float,
) -> AbSession:
    """Run both engines and interleave their top lists.

    The analogical side may legitimately come back empty (e.g. every pool
    member shares the query's far cluster); the session is still created,
    flagged baseline_only, so the study log records the attempt.
    """
    analogical = run_search(index, seed_paper_id, config)[:SESSION_LIST_SIZE]
    lexical = lexical_baseline_search(index, seed_paper_id, SESSION_LIST_SIZE)
    session_id = session_id_for(seed_paper_id, config, seed)
    merged = interleave_results(
        lexical, analogical, seed, tag_a=Engine.ES, tag_b=Engine.AS
    )
    return AbSession(
        session_id=session_id,
        test_id=int(session_id[:8], 16),
        seed_paper_id=seed_paper_id,
        config=config,
        seed=seed,
        interleaved=tuple(merged),
        created_at=created_at,
        baseline_only=not analogical,
    )


def paper_payload(record: PaperRecord) -> dict:
    """Client-facing view of one paper: title, abstract, segment texts.

    Segment texts are keyed by aspect so the UI can paint the highlight
    legend; the full-abstract pseudo-aspect is the abstract itself and is
    not repeated under segments.
    """
    segments = {
        aspect.value: text
        for aspect, text in iter_segments(record)
        if aspect is not Aspect.FULL_ABSTRACT
    }
    abstract = record.raw_abstract
    if abstract is None:
        abstract = " ".join(record.tokens.get(Aspect.FULL_ABSTRACT, []))
    return {
        "paper_id": record.paper_id,
        "title": record.title,
        "abstract": abstract,
        "segments": segments,
    }


def client_view(session: AbSession, index: CorpusIndex) -> dict:
    """What a voter is allowed to see. Never contains engine tags."""
    return {
        "session_id": session.session_id,
        "seed_paper": paper_payload(index.record(session.seed_paper_id)),
        "results": [
            paper_payload(index.record(pid)) for pid, _ in session.interleaved
        ],
        "baseline_only": session.baseline_only,
        "closed": session.closed,
    }


class SessionStore:
    """File-backed session registry with last-write-wins replay.

    Creation appends one line per session; closing appends an updated
    line. Like the vote log, appends are flushed and fsynced.
    """

    def __init__(self, path: str, index: CorpusIndex):
        self.path = path
        self.index = index
        self._write_lock = threading.Lock()
        self._sessions: dict[str, AbSession] = {}
        self._load()

    def _load(self) -> None:
        if not os.path.exists(self.path):
            return
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    session = _session_from_row(json.loads(line))
                except (KeyError, ValueError, json.JSONDecodeError) as exc:
                    raise SessionError(
                        f"session log line {lineno} is corrupt: {exc}"
                    ) from exc
                self._sessions[session.session_id] = session

    def _append(self, session: AbSession) -> None:
        with self._write_lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(_session_to_row(session)) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._sessions[session.session_id] = session

    def create(
        self,
        seed_paper_id: str,
        config: SearchConfig,
        seed: int,
        created_at: float,
    ) -> AbSession:
        existing = self._sessions.get(session_id_for(seed_paper_id, config, seed))
        if existing is not None:
            return existing
        session = create_ab_session(
            self.index, seed_paper_id, config, seed, created_at
        )
        self._append(session)
        return session

    def get(self, session_id: str) -> AbSession:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise SessionError(f"unknown session {session_id!r}") from None

    def close(self, session_id: str) -> AbSession:
        session = self.get(session_id)
        if not session.closed:
            session = dataclasses.replace(session, closed=True)
            self._append(session)
        return session


def _session_to_row(session: AbSession) -> dict:
    return {
        "session_id": session.session_id,
        "test_id": session.test_id,
        "seed_paper_id": session.seed_paper_id,
        "config": session.config.to_dict(),
        "seed": session.seed,
        "interleaved": [[pid, engine.value] for pid, engine in session.interleaved],
        "created_at": session.created_at,
        "baseline_only": session.baseline_only,
        "closed": session.closed,
    }


def _session_from_row(row: dict) -> AbSession:
    return AbSession(
        session_id=row["session_id"],
        test_id=int(row["test_id"]),
        seed_paper_id=row["seed_paper_id"],
        config=SearchConfig.from_dict(row["config"]),
        seed=int(row["seed"]),
        interleaved=tuple(
            (pid, Engine(tag)) for pid, tag in row["interleaved"]
        ),
        created_at=float(row["created_at"]),
        baseline_only=bool(row["baseline_only"]),
        closed=bool(row["closed"]),
    )
