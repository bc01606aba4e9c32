"""Session facade over one loaded artifact.

A :class:`Session` owns the immutable artifact plus the derived caches that
make slider changes cheap (the detection-to-ground-truth IOU candidate lists),
and renders every read operation as a plain JSON-compatible payload. The HTTP
service and the headless CLI both call these methods, which is what keeps
their outputs byte-equivalent: there is exactly one place where responses are
shaped.

All payload methods are pure with respect to the artifact (recompute per
call), so concurrent readers need no locking; only the tag store mutates.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import DatasetError
from .ingest import SetArtifact
from .matching import (
    STATUS_TP,
    AgreementCluster,
    ClusterStatus,
    EvalParams,
    IouCache,
    build_iou_cache,
    evaluate_clusters,
    filter_detections,
    generate_clusters,
    warn_if_thresholds_inverted,
)
from .metrics import containment_matrix, jaccard_matrix, model_scores
from .query import QuerySpec, aggregate, query, tag_export_document, tag_store_for_artifact


@dataclass(frozen=True)
class PipelineResult:
    params: EvalParams
    clusters: list[AgreementCluster]
    statuses: list[ClusterStatus]


class Session:
    """One artifact plus its derived caches and tag store."""

    def __init__(self, artifact: SetArtifact, artifact_path: str | Path | None = None) -> None:
        self.artifact = artifact
        self.detections = artifact.raw.detections
        self.detections_by_id = {d.detection_id: d for d in self.detections}
        self.model_index = {m: i for i, m in enumerate(artifact.raw.models)}
        self.gt_by_id = {g.gt_id: g for g in artifact.raw.ground_truth}
        self.iou_cache: IouCache = build_iou_cache(self.detections, artifact.raw.ground_truth)
        self.tags = tag_store_for_artifact(artifact, artifact_path)
        self._warned_inversion = False

    # ------------------------------------------------------------------ core

    def pipeline(self, params: EvalParams) -> PipelineResult:
        """Filter by confidence, cluster the survivors, and score the clusters."""
        if not self._warned_inversion and params.eval_iou < self.artifact.set_iou:
            warn_if_thresholds_inverted(self.artifact.set_iou, params.eval_iou)
            self._warned_inversion = True
        surviving = filter_detections(self.detections, params)
        clusters = generate_clusters(surviving, self.artifact.edges, self.artifact.set_iou)
        statuses = evaluate_clusters(
            clusters,
            surviving,
            self.artifact.raw.ground_truth,
            params,
            self.iou_cache,
            by_id=self.detections_by_id,
            model_index=self.model_index,
        )
        return PipelineResult(params=params, clusters=clusters, statuses=statuses)

    # -------------------------------------------------------------- payloads

    def meta_payload(self, defaults: EvalParams | None = None) -> dict:
        raw = self.artifact.raw
        per_model: dict[str, int] = {m: 0 for m in raw.models}
        for det in raw.detections:
            per_model[det.model_id] += 1
        payload = {
            "models": list(raw.models),
            "object_class": raw.object_class,
            "set_iou": self.artifact.set_iou,
            "counts": {
                "images": len(raw.images),
                "detections": len(raw.detections),
                "detections_per_model": per_model,
                "ground_truth": len(raw.ground_truth),
                "edges": len(self.artifact.edges),
            },
            "dropped_out_of_class": dict(sorted(raw.dropped_out_of_class.items())),
            "build": {
                "tool_version": self.artifact.build.tool_version,
                "created_at": self.artifact.build.created_at,
                "source_folder": self.artifact.build.source_folder,
            },
        }
        if defaults is not None:
            payload["defaults"] = _params_payload(defaults)
        return payload

    def intersections_payload(self, params: EvalParams) -> dict:
        result = self.pipeline(params)
        bars = aggregate(result.clusters, result.statuses)
        return {
            "params": _params_payload(params),
            "total_clusters": len(result.clusters),
            "bars": [
                {
                    "signature": list(bar.signature),
                    "tp_count": bar.tp_count,
                    "fp_count": bar.fp_count,
                    "total": bar.total,
                    "cluster_ids": list(bar.cluster_ids),
                }
                for bar in bars
            ],
        }

    def query_payload(self, spec: QuerySpec) -> dict:
        spec.validate_models(self.artifact.raw.models)
        result = self.pipeline(spec.params)
        ids = query(spec, result.clusters, result.statuses)
        by_id = {c.cluster_id: c for c in result.clusters}
        status_of = {s.cluster_id: s for s in result.statuses}
        return {
            "params": _params_payload(spec.params),
            "include": sorted(spec.include),
            "exclude": sorted(spec.exclude),
            "neutral": sorted(set(self.artifact.raw.models) - spec.include - spec.exclude),
            "status_filter": spec.status_filter,
            "count": len(ids),
            "cluster_ids": ids,
            "clusters": [self._cluster_payload(by_id[i], status_of[i]) for i in ids],
        }

    def cluster_payload(self, cluster_id: int, params: EvalParams) -> dict:
        result = self.pipeline(params)
        for cluster, status in zip(result.clusters, result.statuses):
            if cluster.cluster_id == cluster_id:
                payload = self._cluster_payload(cluster, status)
                payload["params"] = _params_payload(params)
                return payload
        raise KeyError(
            f"no cluster {cluster_id} at these parameters (cluster count: {len(result.clusters)})"
        )

    def annotations_payload(self, image_id: str, params: EvalParams) -> dict:
        raw = self.artifact.raw
        if image_id not in raw.images:
            raise KeyError(f"unknown image id: {image_id}")
        result = self.pipeline(params)
        cluster_of: dict[int, AgreementCluster] = {}
        for cluster in result.clusters:
            for member in cluster.members:
                cluster_of[member] = cluster
        status_of = {s.cluster_id: s for s in result.statuses}

        detections = []
        for det in raw.detections:
            if det.image_id != image_id:
                continue
            cluster = cluster_of.get(det.detection_id)
            entry = {
                "detection_id": det.detection_id,
                "model_id": det.model_id,
                "box": det.box.as_list(),
                "confidence": det.confidence,
                "in_window": params.conf_min <= det.confidence <= params.conf_max,
                "cluster_id": cluster.cluster_id if cluster else None,
                "status": status_of[cluster.cluster_id].status if cluster else None,
            }
            detections.append(entry)

        claimed = {
            s.matched_gt: s.cluster_id for s in result.statuses if s.status == STATUS_TP
        }
        ground_truth = [
            {
                "gt_id": gt.gt_id,
                "box": gt.box.as_list(),
                "matched_cluster_id": claimed.get(gt.gt_id),
            }
            for gt in raw.ground_truth
            if gt.image_id == image_id
        ]
        info = raw.images[image_id]
        return {
            "image_id": image_id,
            "file": info.file,
            "width": info.width,
            "height": info.height,
            "params": _params_payload(params),
            "detections": detections,
            "ground_truth": ground_truth,
        }

    def metrics_payload(self, params: EvalParams) -> dict:
        scores = model_scores(self.artifact, params)
        jac = jaccard_matrix(self.artifact, params)
        con = containment_matrix(self.artifact, params)
        return {
            "params": _params_payload(params),
            "models": list(jac.models),
            "scores": [
                {
                    "model_id": s.model_id,
                    "tp": s.tp,
                    "fp": s.fp,
                    "fn": s.fn,
                    "precision": s.precision,
                    "recall": s.recall,
                }
                for s in scores
            ],
            "jaccard": [list(row) for row in jac.values],
            "containment": [list(row) for row in con.values],
        }

    def tags_payload(self) -> dict:
        return {"tags": self.tags.snapshot()}

    def tag_export_payload(self) -> dict:
        return tag_export_document(self.tags, self.artifact)

    # -------------------------------------------------------------- internal

    def _cluster_payload(self, cluster: AgreementCluster, status: ClusterStatus) -> dict:
        members = []
        for det_id in cluster.members:
            det = self.detections_by_id[det_id]
            members.append(
                {
                    "detection_id": det.detection_id,
                    "model_id": det.model_id,
                    "box": det.box.as_list(),
                    "confidence": det.confidence,
                }
            )
        info = self.artifact.raw.images[cluster.image_id]
        payload = {
            "cluster_id": cluster.cluster_id,
            "image_id": cluster.image_id,
            "file": info.file,
            "signature": list(cluster.signature),
            "members": members,
            "status": status.status,
            "matched_gt": None,
        }
        if status.matched_gt is not None:
            gt = self.gt_by_id[status.matched_gt]
            payload["matched_gt"] = {
                "gt_id": gt.gt_id,
                "box": gt.box.as_list(),
                "iou": status.match_iou,
            }
        return payload


def _params_payload(params: EvalParams) -> dict:
    return {"eval_iou": params.eval_iou, "conf_min": params.conf_min, "conf_max": params.conf_max}


def safe_image_path(root: str | Path, file: str) -> Path:
    """Resolve an image file inside ``root``, refusing path traversal."""
    root = Path(root).resolve()
    candidate = (root / file).resolve()
    if not candidate.is_relative_to(root):
        raise DatasetError(f"image path escapes the image root: {file!r}")
    return candidate
