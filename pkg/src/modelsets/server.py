"""HTTP service exposing one artifact to the browser explorer.

Every read endpoint is a deterministic function of (artifact, request): the
handlers delegate to the session's payload builders and add nothing of their
own, so a response always equals the corresponding in-process call. Tag
endpoints are the only mutating surface; persistence happens on every change.

Malformed or out-of-range input is answered with 400 and a structured reason —
parameters are never clamped into range silently.
"""

from __future__ import annotations

import gc
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from . import __version__, schemas
from .engine import Session, safe_image_path
from .errors import DatasetError, TagError
from .matching import EvalParams
from .query import QuerySpec


@dataclass(frozen=True)
class ServiceConfig:
    """Serving options; the evaluation defaults seed the UI's sliders."""

    artifact_path: str | None = None
    host: str = "127.0.0.1"
    port: int = 8000
    image_root: str | None = None
    static_dir: str | None = None
    defaults: EvalParams = field(default_factory=lambda: EvalParams(eval_iou=0.5, conf_min=0.7, conf_max=1.0))


def freeze_startup_heap() -> None:
    """Exclude everything loaded so far from cyclic-GC scans.

    A serving process builds one large immortal object graph up front (the
    detections, edges, and IOU caches of the loaded artifact); full
    collections that rescan it mid-request cause pause spikes of tens of
    milliseconds on the interactive endpoints. Call once after the session
    and app are wired, before serving. Objects allocated afterwards are
    still collected normally.
    """
    gc.collect()
    gc.freeze()


def _resolve_params(
    config: ServiceConfig,
    eval_iou: float | None,
    conf_min: float | None,
    conf_max: float | None,
) -> EvalParams:
    """Fill omitted parameters from the service defaults; reject bad ranges."""
    try:
        return EvalParams(
            eval_iou=config.defaults.eval_iou if eval_iou is None else eval_iou,
            conf_min=config.defaults.conf_min if conf_min is None else conf_min,
            conf_max=config.defaults.conf_max if conf_max is None else conf_max,
        )
    except ValueError as exc:
        raise HTTPException(status_code=400, detail={"error": "invalid-params", "reason": str(exc)}) from None


def create_app(session: Session, config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    app = FastAPI(title="modelsets", version=__version__)

    @app.exception_handler(RequestValidationError)
    async def _validation_to_400(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"detail": {"error": "invalid-request", "reason": jsonable_encoder(exc.errors())}},
        )

    @app.get("/api/meta", response_model=schemas.MetaOut)
    def get_meta():
        return session.meta_payload(defaults=config.defaults)

    @app.get("/api/intersections", response_model=schemas.IntersectionsOut)
    def get_intersections(
        eval_iou: float | None = None,
        conf_min: float | None = None,
        conf_max: float | None = None,
    ):
        params = _resolve_params(config, eval_iou, conf_min, conf_max)
        return session.intersections_payload(params)

    @app.post("/api/query", response_model=schemas.QueryOut)
    def post_query(body: schemas.QueryRequest):
        params = _resolve_params(config, body.eval_iou, body.conf_min, body.conf_max)
        models = set(session.artifact.raw.models)
        named = [*body.include, *body.exclude, *body.neutral]
        unknown = sorted(set(named) - models)
        if unknown:
            raise HTTPException(
                status_code=400, detail={"error": "unknown-models", "reason": f"unknown model ids: {unknown}"}
            )
        overlap = sorted(
            (set(body.include) & set(body.exclude))
            | (set(body.include) & set(body.neutral))
            | (set(body.exclude) & set(body.neutral))
        )
        if overlap:
            raise HTTPException(
                status_code=400,
                detail={"error": "conflicting-states", "reason": f"models given two states: {overlap}"},
            )
        spec = QuerySpec(
            include=frozenset(body.include),
            exclude=frozenset(body.exclude),
            status_filter=body.status,
            params=params,
        )
        return session.query_payload(spec)

    @app.get("/api/clusters/{cluster_id}", response_model=schemas.ClusterDetailOut)
    def get_cluster(
        cluster_id: int,
        eval_iou: float | None = None,
        conf_min: float | None = None,
        conf_max: float | None = None,
    ):
        params = _resolve_params(config, eval_iou, conf_min, conf_max)
        try:
            return session.cluster_payload(cluster_id, params)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc.args[0])) from None

    @app.get("/api/images/{image_id}")
    def get_image(image_id: str):
        if config.image_root is None:
            raise HTTPException(status_code=404, detail="service has no image root configured")
        info = session.artifact.raw.images.get(image_id)
        if info is None:
            raise HTTPException(status_code=404, detail=f"unknown image id: {image_id}")
        try:
            path = safe_image_path(config.image_root, info.file)
        except DatasetError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        if not path.is_file():
            raise HTTPException(status_code=404, detail=f"image file not found: {info.file}")
        return FileResponse(path)

    @app.get("/api/images/{image_id}/annotations", response_model=schemas.AnnotationsOut)
    def get_annotations(
        image_id: str,
        eval_iou: float | None = None,
        conf_min: float | None = None,
        conf_max: float | None = None,
    ):
        params = _resolve_params(config, eval_iou, conf_min, conf_max)
        try:
            return session.annotations_payload(image_id, params)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc.args[0])) from None

    @app.get("/api/metrics", response_model=schemas.MetricsOut)
    def get_metrics(
        eval_iou: float | None = None,
        conf_min: float | None = None,
        conf_max: float | None = None,
    ):
        params = _resolve_params(config, eval_iou, conf_min, conf_max)
        try:
            return session.metrics_payload(params)
        except DatasetError as exc:
            raise HTTPException(status_code=400, detail={"error": "no-ground-truth", "reason": str(exc)}) from None

    @app.post("/api/tags", response_model=schemas.TagAssignOut)
    def post_tags(body: schemas.TagRequest):
        try:
            images = session.tags.assign(body.tag, body.image_ids)
        except TagError as exc:
            raise HTTPException(status_code=400, detail={"error": "bad-tag", "reason": str(exc)}) from None
        if session.tags.dirty:
            try:
                session.tags.save()
            except TagError:
                pass  # in-memory store with no backing file keeps working
        return {"tag": body.tag, "image_ids": sorted(images)}

    @app.get("/api/tags", response_model=schemas.TagsOut)
    def get_tags():
        return session.tags_payload()

    @app.get("/api/export/tags")
    def get_export_tags():
        return JSONResponse(
            content=session.tag_export_payload(),
            headers={"Content-Disposition": 'attachment; filename="tags.json"'},
        )

    if config.static_dir is not None and Path(config.static_dir).is_dir():
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="static")

    return app
