"""HTTP+JSON surface over the session store.

POST /sessions, GET /sessions/{id}/scene, POST /sessions/{id}/instruction,
POST /sessions/{id}/advance, GET /sessions/{id}/events, and an SSE push
stream at GET /sessions/{id}/stream. Sessions are in-memory; commands for
one session serialize on its lock.
"""

from __future__ import annotations

import json
import queue
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import StreamingResponse
from pydantic import BaseModel, Field

from ..errors import CapeError, ScenarioInfeasible
from ..pipeline import CapeConfig
from ..sim import Scenario, make_archetype_scenarios
from .sessions import SessionNotFound, SessionStore, SessionTerminal


class ArchetypeRef(BaseModel):
    name: str
    index: int = 0
    seed: int = 0


class CreateSessionRequest(BaseModel):
    scenario: Optional[dict] = None
    archetype: Optional[ArchetypeRef] = None
    seed: int = 0
    k: int = 3
    single_path: bool = False
    no_verify: bool = False


class InstructionRequest(BaseModel):
    text: str


class AdvanceRequest(BaseModel):
    ticks: int = Field(ge=1)


def create_app(store: Optional[SessionStore] = None) -> FastAPI:
    app = FastAPI(title="cape service", version="1")
    sessions = store or SessionStore()

    def _get(session_id: str):
        try:
            return sessions.get(session_id)
        except SessionNotFound:
            raise HTTPException(status_code=404, detail=f"no session {session_id!r}")

    @app.post("/sessions")
    def create_session(req: CreateSessionRequest):
        if (req.scenario is None) == (req.archetype is None):
            raise HTTPException(
                status_code=422, detail="provide exactly one of scenario or archetype"
            )
        try:
            if req.scenario is not None:
                scenario = Scenario.from_json(req.scenario)
            else:
                batch = make_archetype_scenarios(
                    req.archetype.name, req.archetype.index + 1, req.archetype.seed
                )
                scenario = batch[req.archetype.index]
            config = CapeConfig(
                k=req.k, single_path=req.single_path, no_verify=req.no_verify
            )
            session = sessions.create(scenario, req.seed, config)
        except (ScenarioInfeasible, ValueError, KeyError) as e:
            raise HTTPException(status_code=422, detail=str(e))
        return {"session_id": session.id, "scene": session.scene()}

    @app.get("/sessions/{session_id}/scene")
    def get_scene(session_id: str):
        return _get(session_id).scene()

    @app.post("/sessions/{session_id}/instruction")
    def submit_instruction(session_id: str, req: InstructionRequest):
        session = _get(session_id)
        with session.lock:
            try:
                return session.submit_instruction(req.text)
            except SessionTerminal as e:
                raise HTTPException(status_code=409, detail=str(e))
            except ValueError as e:
                raise HTTPException(status_code=422, detail=str(e))

    @app.post("/sessions/{session_id}/advance")
    def advance(session_id: str, req: AdvanceRequest):
        session = _get(session_id)
        with session.lock:
            try:
                return session.advance(req.ticks)
            except SessionTerminal as e:
                raise HTTPException(status_code=409, detail=str(e))
            except ValueError as e:
                raise HTTPException(status_code=422, detail=str(e))

    @app.get("/sessions/{session_id}/events")
    def get_events(session_id: str):
        session = _get(session_id)
        return {"session_id": session.id, "seed": session.seed,
                "events": session.events}

    @app.get("/sessions/{session_id}/stream")
    def stream(session_id: str):
        session = _get(session_id)
        q = session.subscribe()

        def gen():
            # the stream closes itself once the episode is terminal, so
            # clients (and tests) see a finite response
            try:
                while True:
                    try:
                        payload = q.get(timeout=30.0)
                    except queue.Empty:
                        if session.terminal is not None:
                            break
                        yield ": keepalive\n\n"
                        continue
                    yield f"data: {json.dumps(payload, sort_keys=True)}\n\n"
                    if session.terminal is not None:
                        break
            finally:
                session.unsubscribe(q)

        return StreamingResponse(gen(), media_type="text/event-stream")

    @app.exception_handler(CapeError)
    def cape_error(_, exc: CapeError):
        raise HTTPException(status_code=422, detail=str(exc))

    return app


app = create_app()
