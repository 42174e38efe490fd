"""HTTP/JSON session service for the interactive explorer.

Errors are structured JSON of the form {"code", "message", "step"?}.
Mutating requests on one session are serialized; concurrent sessions are
independent. Sessions expire after a configurable idle time, and the whole
store can be snapshotted to a file on shutdown and reloaded on start.
"""
from __future__ import annotations

import json
import secrets
import threading
import time
from contextlib import asynccontextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .errors import LcsimError
from .session import Session
from .statevector import DEFAULT_MAX_QUBITS, Outcome, PauliBasis


@dataclass
class ServiceSettings:
    idle_timeout_s: float = 3600.0
    busy: Literal["queue", "reject"] = "queue"
    persist_path: str | None = None
    max_qubits: int = DEFAULT_MAX_QUBITS


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str, step: int | None = None):
        self.status = status
        self.code = code
        self.message = message
        self.step = step
        super().__init__(message)


class CreateSessionRequest(BaseModel):
    n: int = Field(ge=1)
    seed: int | None = None
    oracle: bool = True
    hybrid: bool = False


class MeasureRequest(BaseModel):
    qubit: int = Field(ge=1)
    basis: Literal["Z", "X", "Y"]
    outcome: Literal["+", "-", "random"] = "random"
    dry_run: bool = False
    seed: int | None = None


class CreateSessionResponse(BaseModel):
    id: str
    n: int
    diagram: dict
    summary: dict


class MeasureResponse(BaseModel):
    committed: bool
    step: dict | None = None
    outcomes: dict | None = None
    diagram: dict | None = None
    byproducts: dict[str, int] | None = None
    schmidt: dict | None = None
    fidelity: float | None = None
    correspondence_ok: bool | None = None


class _Entry:
    def __init__(self, session: Session):
        self.session = session
        self.lock = threading.Lock()
        self.last_access = time.monotonic()


class SessionStore:
    def __init__(self, settings: ServiceSettings):
        self.settings = settings
        self._entries: dict[str, _Entry] = {}
        self._guard = threading.Lock()

    def create(self, session: Session) -> str:
        sid = secrets.token_hex(8)
        with self._guard:
            self._entries[sid] = _Entry(session)
        return sid

    def get(self, sid: str) -> _Entry:
        self.sweep()
        with self._guard:
            entry = self._entries.get(sid)
        if entry is None:
            raise ServiceError(404, "unknown_session", f"no session {sid!r}")
        entry.last_access = time.monotonic()
        return entry

    def delete(self, sid: str) -> None:
        with self._guard:
            if sid not in self._entries:
                raise ServiceError(404, "unknown_session", f"no session {sid!r}")
            del self._entries[sid]

    def sweep(self) -> None:
        cutoff = time.monotonic() - self.settings.idle_timeout_s
        with self._guard:
            stale = [sid for sid, e in self._entries.items() if e.last_access < cutoff]
            for sid in stale:
                del self._entries[sid]

    def items(self) -> list[tuple[str, _Entry]]:
        with self._guard:
            return list(self._entries.items())

    # -- snapshot persistence ---------------------------------------------

    def save(self, path: str) -> None:
        payload = {
            sid: {
                "current": entry.session.serialize(),
                "snapshots": entry.session._snapshots,
            }
            for sid, entry in self.items()
        }
        Path(path).write_text(json.dumps(payload))

    def load(self, path: str) -> int:
        file = Path(path)
        if not file.exists():
            return 0
        payload = json.loads(file.read_text())
        count = 0
        with self._guard:
            for sid, blob in payload.items():
                session = Session.restore(blob["current"], blob["snapshots"])
                self._entries[sid] = _Entry(session)
                count += 1
        return count


def _locked(store: SessionStore, entry: _Entry):
    if store.settings.busy == "reject":
        if not entry.lock.acquire(blocking=False):
            raise ServiceError(409, "busy", "another mutating request is in flight")
        return entry.lock
    entry.lock.acquire()
    return entry.lock


def create_app(settings: ServiceSettings | None = None) -> FastAPI:
    settings = settings or ServiceSettings()
    store = SessionStore(settings)

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        if settings.persist_path:
            store.load(settings.persist_path)
        yield
        if settings.persist_path:
            store.save(settings.persist_path)

    app = FastAPI(title="lcsim session service", lifespan=lifespan)
    app.state.store = store

    @app.exception_handler(ServiceError)
    async def _service_error(_req: Request, exc: ServiceError):
        body: dict[str, Any] = {"code": exc.code, "message": exc.message}
        if exc.step is not None:
            body["step"] = exc.step
        return JSONResponse(status_code=exc.status, content=body)

    @app.exception_handler(LcsimError)
    async def _lcsim_error(_req: Request, exc: LcsimError):
        return JSONResponse(status_code=400, content={"code": exc.code, "message": str(exc)})

    @app.post("/sessions", response_model=CreateSessionResponse, status_code=201)
    def create_session(req: CreateSessionRequest):
        # Session drops the oracle by itself when n exceeds the dense limit.
        session = Session(req.n, seed=req.seed, oracle_on=req.oracle,
                          hybrid=req.hybrid, max_qubits=settings.max_qubits)
        sid = store.create(session)
        view = session.view()
        return CreateSessionResponse(
            id=sid, n=req.n, diagram=view["diagram"],
            summary={k: view[k] for k in ("live_qubits", "oracle_on", "hybrid", "coherent")},
        )

    @app.get("/sessions/{sid}")
    def get_session(sid: str, include_oracle: bool = False):
        entry = store.get(sid)
        return entry.session.view(include_oracle=include_oracle)

    @app.post("/sessions/{sid}/measure", response_model=MeasureResponse,
              response_model_exclude_none=False)
    def measure(sid: str, req: MeasureRequest):
        entry = store.get(sid)
        session = entry.session
        basis = PauliBasis(req.basis)
        if req.dry_run:
            outcomes = session.preview(req.qubit, basis)
            return MeasureResponse(committed=False, outcomes=outcomes)
        outcome = None if req.outcome == "random" else Outcome(req.outcome)
        lock = _locked(store, entry)
        try:
            step = session.measure(req.qubit, basis, outcome, step_seed=req.seed)
        finally:
            lock.release()
        view = session.view()
        return MeasureResponse(
            committed=True,
            step=step,
            diagram=view["diagram"],
            byproducts=view["byproducts"],
            schmidt=step.get("schmidt"),
            fidelity=step.get("fidelity"),
            correspondence_ok=step.get("correspondence_ok"),
        )

    @app.post("/sessions/{sid}/undo")
    def undo(sid: str):
        entry = store.get(sid)
        lock = _locked(store, entry)
        try:
            if not entry.session.history:
                raise ServiceError(400, "empty_history", "nothing to undo")
            entry.session.undo()
        finally:
            lock.release()
        return entry.session.view()

    @app.get("/sessions/{sid}/diagram")
    def diagram(sid: str):
        entry = store.get(sid)
        return entry.session.view()["diagram"]

    @app.delete("/sessions/{sid}")
    def delete(sid: str):
        store.get(sid)
        store.delete(sid)
        return {"deleted": sid}

    return app
