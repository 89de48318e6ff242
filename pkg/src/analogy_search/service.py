"""HTTP service: a thin adapter over the library.

Endpoints do no ranking or evaluation logic of their own; they parse,
delegate, and serialize. Expected domain errors surface as 4xx responses
with a machine-readable ``code`` and a human ``message``; 5xx is reserved
for genuine bugs.
"""

from __future__ import annotations

import os
import time
from typing import Optional

from fastapi import Body, FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .corpus import CorpusIndex, load_index_file
from .errors import AnalogySearchError, SessionError, UnknownPaperError
from .evaluation import (
    EvalDataPoint,
    Interestingness,
    TesInput,
    Usefulness,
    VoteStore,
    aggregate_votes,
    report_to_dict,
    tes_score,
)
from .ranking import ScoredPaper, SearchConfig, run_search
from .sessions import SessionStore, client_view, paper_payload

API_PREFIX = "/api/v1"

# Most domain errors are bad client input; lookups that miss are 404s.
_NOT_FOUND_CODES = {UnknownPaperError.code, SessionError.code}


class ApiError(Exception):
    """Endpoint-level error with an explicit status (e.g. voting on a
    closed session is a conflict, not a lookup failure)."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse({"code": code, "message": message}, status_code=status)


def _require(payload: dict, field: str, kind: type) -> object:
    value = payload.get(field)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ApiError(422, "invalid_request", f"{field} must be a {kind.__name__}")
    return value


def _parse_vote_label(enum_cls, raw: object, field: str):
    try:
        return enum_cls(raw)
    except ValueError:
        allowed = ", ".join(m.value for m in enum_cls)
        raise ApiError(
            422, "invalid_request", f"{field} must be one of: {allowed}"
        ) from None


def _scored_result(index: CorpusIndex, item: ScoredPaper) -> dict:
    payload = paper_payload(index.record(item.paper_id))
    payload["score"] = item.score
    return payload


def create_app(
    index: CorpusIndex,
    votes_path: str,
    sessions_path: str,
    frontend_dist: Optional[str] = None,
) -> FastAPI:
    app = FastAPI(title="analogy-search", openapi_url=f"{API_PREFIX}/openapi.json")
    votes = VoteStore(votes_path, index)
    sessions = SessionStore(sessions_path, index)
    app.state.index = index
    app.state.votes = votes
    app.state.sessions = sessions

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return _error_response(exc.status, exc.code, str(exc))

    @app.exception_handler(AnalogySearchError)
    async def _domain_error(request: Request, exc: AnalogySearchError):
        status = 404 if exc.code in _NOT_FOUND_CODES else 422
        return _error_response(status, exc.code, str(exc))

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return _error_response(422, "invalid_request", str(exc.errors()[:3]))

    @app.get(API_PREFIX + "/papers")
    def list_papers() -> dict:
        return {
            "papers": [
                {"paper_id": pid, "title": index.record(pid).title}
                for pid in index.ids()
            ]
        }

    @app.get(API_PREFIX + "/papers/{paper_id}")
    def get_paper(paper_id: str) -> dict:
        return paper_payload(index.record(paper_id))

    @app.post(API_PREFIX + "/search")
    def search(payload: dict = Body(...)) -> dict:
        query_id = _require(payload, "query_id", str)
        config = SearchConfig.from_dict(payload.get("config") or {})
        results = run_search(index, query_id, config)
        return {
            "query_id": query_id,
            "config": config.to_dict(),
            "results": [_scored_result(index, item) for item in results],
        }

    @app.post(API_PREFIX + "/ab-sessions")
    def create_session(payload: dict = Body(...)) -> dict:
        seed_paper_id = _require(payload, "seed_paper_id", str)
        config = SearchConfig.from_dict(payload.get("config") or {})
        seed = payload.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ApiError(422, "invalid_request", "seed must be an integer")
        session = sessions.create(seed_paper_id, config, seed, time.time())
        return client_view(session, index)

    @app.get(API_PREFIX + "/ab-sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        return client_view(sessions.get(session_id), index)

    @app.post(API_PREFIX + "/ab-sessions/{session_id}/close")
    def close_session(session_id: str) -> dict:
        session = sessions.close(session_id)
        return {"session_id": session.session_id, "closed": True}

    @app.post(API_PREFIX + "/votes")
    def record_vote(payload: dict = Body(...)) -> dict:
        session = sessions.get(str(_require(payload, "session_id", str)))
        if session.closed:
            raise ApiError(
                409, "session_closed",
                f"session {session.session_id} is closed to voting",
            )
        result_paper_id = str(_require(payload, "result_paper_id", str))
        try:
            engine = session.engine_for(result_paper_id)
        except SessionError as exc:
            raise ApiError(422, "not_in_session", str(exc)) from None
        point = EvalDataPoint(
            test_id=session.test_id,
            seed_paper_id=session.seed_paper_id,
            engine=engine,
            result_paper_id=result_paper_id,
            if_useful=_parse_vote_label(
                Usefulness, payload.get("if_useful"), "if_useful"
            ),
            if_interesting=_parse_vote_label(
                Interestingness, payload.get("if_interesting"), "if_interesting"
            ),
            user_id=str(_require(payload, "user_id", str)),
            useful_comment=str(payload.get("useful_comment", "")),
            interesting_comment=str(payload.get("interesting_comment", "")),
        )
        votes.record_vote(point, timestamp=time.time())
        return {"recorded": True, "session_id": session.session_id}

    @app.get(API_PREFIX + "/ab-sessions/{session_id}/votes")
    def session_votes(session_id: str, user_id: Optional[str] = None) -> dict:
        """Saved votes for re-rendering a reloaded page. Engine withheld."""
        session = sessions.get(session_id)
        rows = [
            {
                "result_paper_id": p.result_paper_id,
                "if_useful": p.if_useful.value,
                "if_interesting": p.if_interesting.value,
                "useful_comment": p.useful_comment,
                "interesting_comment": p.interesting_comment,
                "user_id": p.user_id,
            }
            for p in votes.load_points()
            if p.test_id == session.test_id
            and (user_id is None or p.user_id == user_id)
        ]
        return {"session_id": session_id, "votes": rows}

    @app.get(API_PREFIX + "/reports/aggregate")
    def report_aggregate() -> dict:
        return report_to_dict(aggregate_votes(votes.load_points()))

    @app.get(API_PREFIX + "/reports/tes")
    def report_tes(inputs: list[str] = Query(default=[])) -> dict:
        scores = []
        for raw in inputs:
            parts = raw.split(":")
            if len(parts) != 3:
                raise ApiError(
                    422, "invalid_request",
                    f"inputs entries look like alpha:beta:n, got {raw!r}",
                )
            try:
                alpha, beta, n = (int(p) for p in parts)
            except ValueError:
                raise ApiError(
                    422, "invalid_request", f"non-integer tally in {raw!r}"
                ) from None
            tally = TesInput(alpha, beta, n)
            scores.append(
                {"alpha": alpha, "beta": beta, "n": n, "tes": tes_score(tally)}
            )
        return {"scores": scores}

    if frontend_dist and os.path.isdir(frontend_dist):
        app.mount("/", StaticFiles(directory=frontend_dist, html=True), name="ui")

    return app


def build_app(
    index_path: str,
    votes_path: str,
    sessions_path: str,
    frontend_dist: Optional[str] = None,
) -> FastAPI:
    """Load the index from disk and assemble the app (CLI entry)."""
    return create_app(load_index_file(index_path), votes_path, sessions_path, frontend_dist)
