"""Request and response bodies for the HTTP service.

Response schemas mirror the engine's payload dictionaries field for field;
the engine stays the single source of payload shape, and these models document
and validate it at the boundary. Request models reject unknown fields so a
misspelled key fails loudly instead of silently meaning "neutral".
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


class QueryRequest(BaseModel):
    """Tri-state query body: any model not named in ``include``/``exclude``
    is neutral; ``neutral`` may name them explicitly for validation."""

    model_config = ConfigDict(extra="forbid")

    include: list[str] = Field(default_factory=list)
    exclude: list[str] = Field(default_factory=list)
    neutral: list[str] = Field(default_factory=list)
    status: Literal["all", "tp", "fp"] = "all"
    eval_iou: float | None = None
    conf_min: float | None = None
    conf_max: float | None = None


class TagRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    tag: str
    image_ids: list[str]


class ParamsOut(BaseModel):
    eval_iou: float
    conf_min: float
    conf_max: float


class CountsOut(BaseModel):
    images: int
    detections: int
    detections_per_model: dict[str, int]
    ground_truth: int
    edges: int


class BuildOut(BaseModel):
    tool_version: str
    created_at: str
    source_folder: str


class MetaOut(BaseModel):
    models: list[str]
    object_class: str
    set_iou: float
    counts: CountsOut
    dropped_out_of_class: dict[str, int]
    build: BuildOut
    defaults: ParamsOut


class BarOut(BaseModel):
    signature: list[str]
    tp_count: int
    fp_count: int
    total: int
    cluster_ids: list[int]


class IntersectionsOut(BaseModel):
    params: ParamsOut
    total_clusters: int
    bars: list[BarOut]


class MemberOut(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    detection_id: int
    model_id: str
    box: list[float]
    confidence: float


class MatchedGtOut(BaseModel):
    gt_id: int
    box: list[float]
    iou: float


class ClusterOut(BaseModel):
    cluster_id: int
    image_id: str
    file: str
    signature: list[str]
    members: list[MemberOut]
    status: Literal["tp", "fp"]
    matched_gt: MatchedGtOut | None


class ClusterDetailOut(BaseModel):
    """GET /api/clusters/{id}: the cluster plus the parameters it exists under."""

    cluster_id: int
    image_id: str
    file: str
    signature: list[str]
    members: list[MemberOut]
    status: Literal["tp", "fp"]
    matched_gt: MatchedGtOut | None
    params: ParamsOut


class QueryOut(BaseModel):
    params: ParamsOut
    include: list[str]
    exclude: list[str]
    neutral: list[str]
    status_filter: Literal["all", "tp", "fp"]
    count: int
    cluster_ids: list[int]
    clusters: list[ClusterOut]


class DetectionAnnotationOut(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    detection_id: int
    model_id: str
    box: list[float]
    confidence: float
    in_window: bool
    cluster_id: int | None
    status: Literal["tp", "fp"] | None


class GroundTruthAnnotationOut(BaseModel):
    gt_id: int
    box: list[float]
    matched_cluster_id: int | None


class AnnotationsOut(BaseModel):
    image_id: str
    file: str
    width: int
    height: int
    params: ParamsOut
    detections: list[DetectionAnnotationOut]
    ground_truth: list[GroundTruthAnnotationOut]


class ScoreOut(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    model_id: str
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float


class MetricsOut(BaseModel):
    params: ParamsOut
    models: list[str]
    scores: list[ScoreOut]
    jaccard: list[list[float]]
    containment: list[list[float]]


class TagsOut(BaseModel):
    tags: dict[str, list[str]]


class TagAssignOut(BaseModel):
    tag: str
    image_ids: list[str]
