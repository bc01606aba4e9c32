"""Set-theoretic model comparison: pairwise Jaccard and Tversky-containment
matrices over agreement-cluster memberships, plus per-model precision/recall.

The element universe for the similarity metrics is the set of agreement
clusters produced at the caller's evaluation parameters, so (like the chart)
the metrics respond to the confidence window. A model's membership set is the
set of cluster ids whose signature names it; two models that always land in
the same clusters have Jaccard 1 even if their raw box coordinates differ.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DatasetError
from .ingest import SetArtifact
from .matching import (
    AgreementCluster,
    EvalParams,
    build_iou_cache,
    evaluate_model,
    filter_detections,
    generate_clusters,
)


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric pairwise ratios in [0, 1] with a unit diagonal, in canonical
    model order."""

    models: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.models)
        if len(self.values) != n or any(len(row) != n for row in self.values):
            raise ValueError("matrix shape does not match model count")
        for i in range(n):
            if abs(self.values[i][i] - 1.0) > 1e-12:
                raise ValueError(f"diagonal entry for {self.models[i]!r} is not 1")
            for j in range(n):
                v = self.values[i][j]
                if not 0.0 <= v <= 1.0:
                    raise ValueError(f"value out of range at ({i}, {j}): {v}")
                if abs(v - self.values[j][i]) > 1e-12:
                    raise ValueError(f"matrix not symmetric at ({i}, {j})")

    def value(self, model_a: str, model_b: str) -> float:
        ia, ib = self.models.index(model_a), self.models.index(model_b)
        return self.values[ia][ib]


@dataclass(frozen=True)
class DirectedMatrix:
    """Row-to-column containment ratios: entry (i, j) says how much of model
    i's membership lies inside model j's. Unit diagonal, not symmetric."""

    models: tuple[str, ...]
    values: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.models)
        if len(self.values) != n or any(len(row) != n for row in self.values):
            raise ValueError("matrix shape does not match model count")
        for i in range(n):
            if abs(self.values[i][i] - 1.0) > 1e-12:
                raise ValueError(f"diagonal entry for {self.models[i]!r} is not 1")
            if any(not 0.0 <= v <= 1.0 for v in self.values[i]):
                raise ValueError(f"value out of range in row {i}")

    def value(self, contained: str, container: str) -> float:
        return self.values[self.models.index(contained)][self.models.index(container)]


@dataclass(frozen=True)
class ModelScore:
    """Per-model match counts against ground truth at fixed thresholds."""

    model_id: str
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0


def jaccard(a_elements: set, b_elements: set) -> float:
    """|A ∩ B| / |A ∪ B|; two empty sets count as identical (1.0)."""
    union = a_elements | b_elements
    if not union:
        return 1.0
    return len(a_elements & b_elements) / len(union)


def tversky(a_elements: set, b_elements: set, alpha: float = 1.0, beta: float = 0.0) -> float:
    """Tversky index |A∩B| / (|A∩B| + α|A−B| + β|B−A|); α=β=1 is Jaccard.

    A zero denominator (possible only when the weighted difference terms
    vanish along with the intersection) counts as full similarity.
    """
    if alpha < 0.0 or beta < 0.0:
        raise ValueError("alpha and beta must be non-negative")
    inter = len(a_elements & b_elements)
    denom = inter + alpha * len(a_elements - b_elements) + beta * len(b_elements - a_elements)
    if denom == 0.0:
        return 1.0
    return inter / denom


def tversky_containment(contained_elements: set, container_elements: set) -> float:
    """How much of the first set lies inside the second: |A∩B| / |contained|.

    1.0 means every element of the contained set also belongs to the container
    (an ensemble of the two adds nothing over the container alone); the empty
    contained set is trivially fully contained.
    """
    return tversky(contained_elements, container_elements, alpha=1.0, beta=0.0)


def model_membership(clusters: list[AgreementCluster]) -> dict[str, set[int]]:
    """Each model's set of cluster ids (its element set for the metrics)."""
    membership: dict[str, set[int]] = {}
    for cluster in clusters:
        for model_id in cluster.signature:
            membership.setdefault(model_id, set()).add(cluster.cluster_id)
    return membership


def _clusters_at(artifact: SetArtifact, params: EvalParams) -> list[AgreementCluster]:
    surviving = filter_detections(artifact.raw.detections, params)
    return generate_clusters(surviving, artifact.edges, artifact.set_iou)


def jaccard_matrix(artifact: SetArtifact, params: EvalParams) -> SimilarityMatrix:
    """Pairwise Jaccard over cluster memberships at ``params``."""
    models = tuple(artifact.raw.models)
    membership = model_membership(_clusters_at(artifact, params))
    sets = [membership.get(m, set()) for m in models]
    values = tuple(
        tuple(jaccard(sets[i], sets[j]) for j in range(len(models))) for i in range(len(models))
    )
    return SimilarityMatrix(models=models, values=values)


def containment_matrix(artifact: SetArtifact, params: EvalParams) -> DirectedMatrix:
    """Pairwise Tversky containment: row model contained in column model."""
    models = tuple(artifact.raw.models)
    membership = model_membership(_clusters_at(artifact, params))
    sets = [membership.get(m, set()) for m in models]
    values = tuple(
        tuple(tversky_containment(sets[i], sets[j]) for j in range(len(models)))
        for i in range(len(models))
    )
    return DirectedMatrix(models=models, values=values)


def model_scores(
    artifact: SetArtifact,
    params: EvalParams,
    iou_cache=None,
) -> list[ModelScore]:
    """Per-model TP/FP/FN at ``params`` (confidence window applied first),
    in canonical model order. Requires ground truth."""
    if not artifact.raw.ground_truth:
        raise DatasetError("scores require ground truth")
    surviving = filter_detections(artifact.raw.detections, params)
    if iou_cache is None:
        iou_cache = build_iou_cache(surviving, artifact.raw.ground_truth)
    scores = []
    for model_id in artifact.raw.models:
        ev = evaluate_model(model_id, surviving, artifact.raw.ground_truth, params.eval_iou, iou_cache)
        scores.append(ModelScore(model_id=model_id, tp=ev.tp_count, fp=ev.fp_count, fn=ev.fn_count))
    return scores
