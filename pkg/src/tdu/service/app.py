"""HTTP endpoints over the platform's JSON encodings."""

from __future__ import annotations

import errno
import json
import socket
from contextlib import asynccontextmanager
from typing import Optional

from fastapi import Depends, FastAPI, HTTPException, Query, Request
from fastapi.responses import JSONResponse

from ..compiler.policy import CompileError
from ..dataplane.readings import IngestError
from ..enforcement import RequestError
from ..platform import Platform, PlatformConfig, PlatformError, vocabulary
from ..platform import api
from ..tduo.codec import parse_usage_policy, policy_from_dict
from ..tduo.model import ModelError
from .schemas import (Health, HistoryOut, PolicyAdded, PolicyList, QueryIn, QueryOut, ReadingsAdded,
                      SubjectIn)

_CLIENT_ERRORS = (CompileError, IngestError, RequestError, PlatformError, ModelError, KeyError)


def create_app(platform: Platform) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        platform.close()

    app = FastAPI(title="tdu", summary="Trust-based data usage enforcement", lifespan=lifespan)
    app.state.platform = platform

    def get_platform() -> Platform:
        return app.state.platform

    @app.exception_handler(ValueError)
    async def _bad_input(request: Request, exc: ValueError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health", response_model=Health)
    def health(p: Platform = Depends(get_platform)):
        return Health(status="ok", policies=len(p.policies()), readings=len(p.dataset),
                      records=len(p.ledger))

    @app.get("/vocabulary")
    def get_vocabulary():
        return vocabulary()

    @app.post("/policies", response_model=PolicyAdded, status_code=201)
    async def add_policy(request: Request, p: Platform = Depends(get_platform)):
        """Register a UsagePolicy sent as TDUO XML or JSON (chosen by Content-Type)."""
        body = await request.body()
        ctype = request.headers.get("content-type", "")
        try:
            if "xml" in ctype:
                policy = parse_usage_policy(body, "xml")
            else:
                policy = policy_from_dict(json.loads(body))
            p.add_policy(policy)
        except (*_CLIENT_ERRORS, ValueError) as exc:
            raise HTTPException(422, str(exc)) from None
        return PolicyAdded(name=policy.name, policies=len(p.policies()))

    @app.get("/policies", response_model=PolicyList)
    def list_policies(p: Platform = Depends(get_platform)):
        return api.policies_payload(p)

    @app.get("/policies/check")
    def check_policies(p: Platform = Depends(get_platform)):
        report = p.check_policies()
        return {"conflicts": [list(pair) for pair in report.source_pairs], "summary": str(report)}

    @app.post("/data/readings", response_model=ReadingsAdded)
    async def add_readings(request: Request, p: Platform = Depends(get_platform)):
        """Import readings as CSV with the standard header line."""
        text = (await request.body()).decode("utf-8")
        try:
            added, dups = p.ingest_csv(text)
        except _CLIENT_ERRORS as exc:
            raise HTTPException(422, str(exc)) from None
        return ReadingsAdded(added=added, duplicates=dups, total=len(p.dataset))

    @app.post("/query", response_model=QueryOut)
    def query(body: QueryIn, p: Platform = Depends(get_platform)):
        try:
            return api.run_query(p, body.model_dump(exclude_none=True))
        except _CLIENT_ERRORS as exc:
            raise HTTPException(422, str(exc)) from None

    @app.get("/usage-history", response_model=HistoryOut)
    def usage_history(policy: Optional[str] = None, subject: Optional[str] = None,
                      outcome: Optional[str] = None, since: Optional[float] = Query(None),
                      until: Optional[float] = Query(None), p: Platform = Depends(get_platform)):
        return api.history_payload(p, policy=policy, subject=subject, outcome=outcome,
                                   since=since, until=until)

    @app.post("/subjects", status_code=201)
    def add_subject(body: SubjectIn, p: Platform = Depends(get_platform)):
        try:
            p.add_subject(body.name, body.actorClass)
        except _CLIENT_ERRORS as exc:
            raise HTTPException(422, str(exc)) from None
        return {"subjects": {k: v.value for k, v in p.subjects().items()}}

    @app.get("/subjects")
    def list_subjects(p: Platform = Depends(get_platform)):
        return {"subjects": {k: v.value for k, v in p.subjects().items()}}

    return app


class ServeError(RuntimeError):
    pass


def check_port(host: str, port: int) -> None:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as s:
        try:
            s.bind((host, port))
        except OSError as exc:
            if exc.errno == errno.EADDRINUSE:
                raise ServeError(f"port {port} on {host} is busy") from None
            raise ServeError(f"cannot bind {host}:{port}: {exc}") from None


def build(config: PlatformConfig) -> FastAPI:
    try:
        platform = Platform(config.data_dir, modal_conversion=config.modal_conversion,
                            ledger_path=config.ledger_path)
    except (PlatformError, OSError) as exc:
        raise ServeError(f"data dir {config.data_dir}: {exc}") from None
    return create_app(platform)


def serve(config: PlatformConfig) -> None:
    """Run until interrupted; the ledger is synced on every append."""
    import uvicorn

    check_port(config.host, config.port)
    uvicorn.run(build(config), host=config.host, port=config.port, log_level="info")
