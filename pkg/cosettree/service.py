"""
cosettree — FastAPI Application

REST endpoints over the command facade, plus SSE streaming of derivative
stages.

Design patterns:
  - Facade: every endpoint delegates to cosettree.pipeline
  - Observer: SSE events push one derivative stage at a time
"""

from __future__ import annotations

import json
import logging
import time
from contextlib import asynccontextmanager
from typing import AsyncIterator, Optional

from fastapi import FastAPI, HTTPException, Path, Request
from pydantic import BaseModel, Field, ValidationError
from sse_starlette.sse import EventSourceResponse

from cosettree import FORMAT_TAG, __version__, pipeline
from cosettree.config import settings
from cosettree.errors import CosetTreeError, InputError
from cosettree.models import EmbeddingPlan, HInfReport, TamenessReport, TreeAnalysis, TreeDocument
from cosettree.tameness.sequences import SpecDocument, spec_from_document
from cosettree.trees.codec import tree_from_document
from cosettree.trees.engine import FrontierMode

logger = logging.getLogger(__name__)


# ── Lifespan: startup/shutdown ────────────────────────────


@asynccontextmanager
async def lifespan(app: FastAPI) -> AsyncIterator[None]:
    logging.basicConfig(
        level=settings.log_level.upper(),
        format="%(asctime)s [%(levelname)s] %(name)s — %(message)s",
    )
    logger.info("cosettree service %s starting up", __version__)
    logger.info("   caps: order=%d nodes=%d", settings.order_cap, settings.node_cap)
    yield
    logger.info("cosettree service shutting down")


# ── App instance ──────────────────────────────────────────

app = FastAPI(
    title="cosettree",
    version=__version__,
    description="Group/coset trees, tameness classification and H_inf embedding plans",
    lifespan=lifespan,
)


# ── Logging middleware ────────────────────────────────────


@app.middleware("http")
async def log_requests(request: Request, call_next):
    t0 = time.perf_counter()
    response = await call_next(request)
    elapsed = (time.perf_counter() - t0) * 1000
    logger.info(
        "%s %s → %d (%.0f ms)",
        request.method,
        request.url.path,
        response.status_code,
        elapsed,
    )
    return response


# ── Request bodies ────────────────────────────────────────


class PlanRequest(BaseModel):
    spec: SpecDocument
    horizon: int = Field(default=settings.default_horizon, ge=2)


class TreeRequest(BaseModel):
    tree: TreeDocument
    mode: FrontierMode = FrontierMode(settings.default_mode)
    steps: Optional[int] = Field(default=None, ge=0)


def _fail(exc: Exception) -> HTTPException:
    if isinstance(exc, (InputError, ValidationError)):
        return HTTPException(status_code=422, detail=str(exc))
    logger.exception("request failed")
    return HTTPException(status_code=500, detail=f"internal error: {exc}")


# ── Endpoints ─────────────────────────────────────────────


@app.get("/api/health")
async def health():
    return {"status": "ok", "version": __version__, "format": FORMAT_TAG}


@app.post("/api/classify", response_model=TamenessReport)
async def classify(body: SpecDocument):
    try:
        return pipeline.classify_report(spec_from_document(body))
    except CosetTreeError as exc:
        raise _fail(exc)


@app.post("/api/plan", response_model=EmbeddingPlan)
async def plan(body: PlanRequest):
    try:
        return pipeline.plan_report(spec_from_document(body.spec), body.horizon)
    except CosetTreeError as exc:
        raise _fail(exc)


@app.post("/api/tree/analyze", response_model=TreeAnalysis)
async def analyze(body: TreeRequest):
    try:
        return pipeline.analyze_tree(tree_from_document(body.tree), body.mode)
    except CosetTreeError as exc:
        raise _fail(exc)


@app.post("/api/tree/derivatives/stream")
async def derivatives_stream(body: TreeRequest):
    """One SSE ``stage`` event per derivative, then ``done``."""
    try:
        tree = tree_from_document(body.tree)
    except CosetTreeError as exc:
        raise _fail(exc)

    async def event_generator() -> AsyncIterator[dict]:
        count = 0
        try:
            for stage in pipeline.iter_stages(tree, body.mode, body.steps):
                count += 1
                yield {"event": "stage", "data": json.dumps(stage.model_dump(mode="json"), sort_keys=True)}
        except CosetTreeError as exc:
            yield {"event": "error", "data": json.dumps({"detail": str(exc)})}
            return
        yield {"event": "done", "data": json.dumps({"stages": count})}

    return EventSourceResponse(event_generator())


@app.get("/api/hinf/{n}", response_model=HInfReport)
async def hinf(n: int = Path(..., ge=0)):
    return pipeline.hinf_report(n)
