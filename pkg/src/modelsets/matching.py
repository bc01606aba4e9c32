"""Cross-model detection matching: IOU, edge generation, agreement clustering,
and TP/FP evaluation against ground truth.

The pipeline runs in two passes of box matching. The first pass (build time)
compares detections *across models* and caches every cross-model, same-image
pair at or above the set-generation threshold as an edge. The second pass
(query time) filters detections by confidence, greedily merges the surviving
edges into agreement clusters, and scores each cluster against ground truth at
the evaluation threshold. All operations are pure functions of immutable
inputs and safe to call concurrently.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import datetime, timezone

from . import __version__
from .ingest import (
    BoundingBox,
    BuildMetadata,
    Detection,
    GroundTruthObject,
    RawDataset,
    SetArtifact,
)

logger = logging.getLogger(__name__)

STATUS_TP = "tp"
STATUS_FP = "fp"

# (iou, gt_id) candidate lists per detection id, descending by IOU
IouCache = dict[int, list[tuple[float, int]]]


@dataclass(frozen=True)
class EvalParams:
    """Interactive evaluation criteria: ground-truth IOU threshold plus the
    confidence window applied before clustering."""

    eval_iou: float = 0.5
    conf_min: float = 0.0
    conf_max: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.eval_iou <= 1.0:
            raise ValueError(f"eval_iou {self.eval_iou} outside (0, 1]")
        if not 0.0 <= self.conf_min <= 1.0:
            raise ValueError(f"conf_min {self.conf_min} outside [0, 1]")
        if not 0.0 <= self.conf_max <= 1.0:
            raise ValueError(f"conf_max {self.conf_max} outside [0, 1]")
        if self.conf_min > self.conf_max:
            raise ValueError(f"conf_min {self.conf_min} exceeds conf_max {self.conf_max}")


# the two record types below are built in bulk on every slider change, so they
# trade frozen-ness for cheap construction (slots keep them compact)
@dataclass(slots=True)
class AgreementCluster:
    """A group of detections (at most one per model) judged to be the same
    prediction; the element over which all set reasoning happens."""

    cluster_id: int
    image_id: str
    members: tuple[int, ...]  # detection ids, ascending
    signature: tuple[str, ...]  # model ids present, canonical order


@dataclass(slots=True)
class ClusterStatus:
    cluster_id: int
    status: str  # STATUS_TP or STATUS_FP
    matched_gt: int | None = None
    match_iou: float | None = None


@dataclass(slots=True)
class DetectionStatus:
    detection_id: int
    status: str
    matched_gt: int | None = None
    match_iou: float | None = None


@dataclass(frozen=True)
class ModelEvaluation:
    """Single-model greedy matching result plus the false-negative count."""

    model_id: str
    statuses: tuple[DetectionStatus, ...]
    fn_count: int

    @property
    def tp_count(self) -> int:
        return sum(1 for s in self.statuses if s.status == STATUS_TP)

    @property
    def fp_count(self) -> int:
        return sum(1 for s in self.statuses if s.status == STATUS_FP)


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union of two boxes; 0.0 when disjoint.

    Areas are computed from the same corner coordinates as the intersection
    (not from w*h directly), so identical boxes give exactly 1.0 even when
    ``(x + w) - x`` rounds differently than ``w``.
    """
    ax2, ay2 = a.x + a.w, a.y + a.h
    bx2, by2 = b.x + b.w, b.y + b.h
    ix = max(a.x, b.x)
    iy = max(a.y, b.y)
    iw = min(ax2, bx2) - ix
    ih = min(ay2, by2) - iy
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    area_a = (ax2 - a.x) * (ay2 - a.y)
    area_b = (bx2 - b.x) * (by2 - b.y)
    # the true ratio never exceeds 1; the clamp only removes last-ulp noise
    return min(1.0, inter / (area_a + area_b - inter))


def filter_detections(detections: list[Detection], params: EvalParams) -> list[Detection]:
    """Keep detections whose confidence falls inside the window, in order."""
    lo, hi = params.conf_min, params.conf_max
    return [d for d in detections if lo <= d.confidence <= hi]


def compute_edges(dataset: RawDataset, set_iou: float) -> list[tuple[int, int, float]]:
    """All cross-model, same-image detection pairs with IOU >= ``set_iou``.

    Each edge is oriented so its first endpoint comes from the model with the
    lower canonical index. The list is sorted descending by IOU; ties break by
    (first endpoint's model index, first detection id, second model index,
    second detection id), which keeps the order stable under threshold changes.
    """
    if not 0.0 < set_iou <= 1.0:
        raise ValueError(f"set_iou {set_iou} outside (0, 1]")
    model_index = dataset.model_index()

    by_image: dict[str, list[Detection]] = {}
    for det in dataset.detections:
        by_image.setdefault(det.image_id, []).append(det)

    edges: list[tuple[float, int, int, int, int]] = []
    for group in by_image.values():
        n = len(group)
        for i in range(n):
            a = group[i]
            a_idx = model_index[a.model_id]
            for j in range(i + 1, n):
                b = group[j]
                b_idx = model_index[b.model_id]
                if a_idx == b_idx:
                    continue
                value = iou(a.box, b.box)
                if value < set_iou:
                    continue
                if a_idx < b_idx:
                    edges.append((-value, a_idx, a.detection_id, b_idx, b.detection_id))
                else:
                    edges.append((-value, b_idx, b.detection_id, a_idx, a.detection_id))
    edges.sort()
    return [(first, second, -neg) for neg, _, first, _, second in edges]


def generate_clusters(
    detections: list[Detection],
    edges: list[tuple[int, int, float]],
    set_iou: float,
) -> list[AgreementCluster]:
    """Greedily merge edges into agreement clusters over the surviving detections.

    ``edges`` must already be in canonical descending order (as produced by
    :func:`compute_edges` or stored in an artifact); edges below ``set_iou`` or
    touching detections absent from ``detections`` are skipped, so a cached
    edge list built at a lower threshold can be reused at a higher one.

    Two clusters merge only if their model signatures are disjoint, which
    guarantees at most one detection per model per cluster. Detections never
    merged become singletons. Cluster ids are assigned ascending by each
    cluster's lowest member detection id.
    """
    index_of = {d.detection_id: i for i, d in enumerate(detections)}
    models = sorted({d.model_id for d in detections})
    model_bit = {m: 1 << i for i, m in enumerate(models)}

    parent = list(range(len(detections)))
    mask = [model_bit[d.model_id] for d in detections]
    # the eventual cluster sort key, maintained during union so no extra pass
    # over the members is needed at the end
    min_id = [d.detection_id for d in detections]

    # the union-find is open-coded (path halving) because this runs on every
    # slider change over every edge
    get_index = index_of.get
    for id_a, id_b, value in edges:
        if value < set_iou:
            continue
        ra = get_index(id_a)
        if ra is None:
            continue
        rb = get_index(id_b)
        if rb is None:
            continue
        while parent[ra] != ra:
            parent[ra] = parent[parent[ra]]
            ra = parent[ra]
        while parent[rb] != rb:
            parent[rb] = parent[parent[rb]]
            rb = parent[rb]
        if ra == rb:
            continue
        ma, mb = mask[ra], mask[rb]
        if ma & mb:
            continue
        parent[rb] = ra
        mask[ra] = ma | mb
        if min_id[rb] < min_id[ra]:
            min_id[ra] = min_id[rb]

    groups: dict[int, list[int]] = {}
    for i in range(len(detections)):
        r = i
        while parent[r] != r:
            parent[r] = parent[parent[r]]
            r = parent[r]
        group = groups.get(r)
        if group is None:
            groups[r] = [i]
        else:
            group.append(i)

    clusters = []
    for root, group in sorted(groups.items(), key=lambda kv: min_id[kv[0]]):
        if len(group) == 1:
            d = detections[group[0]]
            cluster = AgreementCluster(
                cluster_id=len(clusters),
                image_id=d.image_id,
                members=(d.detection_id,),
                signature=(d.model_id,),
            )
        else:
            cluster = AgreementCluster(
                cluster_id=len(clusters),
                image_id=detections[group[0]].image_id,
                members=tuple(sorted(detections[i].detection_id for i in group)),
                signature=tuple(sorted({detections[i].model_id for i in group})),
            )
        clusters.append(cluster)
    return clusters


def build_iou_cache(detections: list[Detection], ground_truth: list[GroundTruthObject]) -> IouCache:
    """Per-detection candidate lists of overlapping same-image ground-truth
    objects, sorted by descending IOU (ties by lower gt id).

    Computing this once per artifact keeps the interactive evaluation path off
    the O(detections x ground truth) IOU arithmetic.
    """
    gt_by_image: dict[str, list[GroundTruthObject]] = {}
    for gt in ground_truth:
        gt_by_image.setdefault(gt.image_id, []).append(gt)
    cache: IouCache = {}
    for det in detections:
        candidates = []
        for gt in gt_by_image.get(det.image_id, ()):
            value = iou(det.box, gt.box)
            if value > 0.0:
                candidates.append((value, gt.gt_id))
        candidates.sort(key=lambda c: (-c[0], c[1]))
        cache[det.detection_id] = candidates
    return cache


def evaluate_clusters(
    clusters: list[AgreementCluster],
    detections: list[Detection],
    ground_truth: list[GroundTruthObject],
    params: EvalParams,
    iou_cache: IouCache | None = None,
    by_id: dict[int, Detection] | None = None,
    model_index: dict[str, int] | None = None,
) -> list[ClusterStatus]:
    """Score each cluster TP/FP against ground truth at ``params.eval_iou``.

    Each cluster is represented by its highest-confidence member (ties fall to
    the lower model index, then the lower detection id). Clusters are
    processed in descending representative confidence (ties by cluster id), and
    each ground-truth object validates at most one cluster: a cluster is a true
    positive iff the best-IOU unclaimed ground-truth object on its image
    reaches the threshold. Statuses are returned in cluster id order.

    ``by_id`` and ``model_index`` may be passed precomputed by callers that
    hold them anyway; supersets are fine (only cluster members are looked up,
    and tie-breaks compare models by relative order, which a superset
    preserves).
    """
    if by_id is None:
        by_id = {d.detection_id: d for d in detections}
    if model_index is None:
        model_index = {m: i for i, m in enumerate(sorted({d.model_id for d in detections}))}
    if iou_cache is None:
        iou_cache = build_iou_cache([by_id[d.detection_id] for d in detections], ground_truth)

    # (descending confidence, cluster id, cluster, representative) — plain
    # tuple sort; the id column makes later columns unreachable for ties
    order = []
    for cluster in clusters:
        members = cluster.members
        rep = by_id[members[0]]
        if len(members) > 1:
            rep_key = (-rep.confidence, model_index[rep.model_id], rep.detection_id)
            for member in members[1:]:
                d = by_id[member]
                key = (-d.confidence, model_index[d.model_id], d.detection_id)
                if key < rep_key:
                    rep, rep_key = d, key
        order.append((-rep.confidence, cluster.cluster_id, cluster, rep))
    order.sort(key=lambda entry: entry[:2])

    eval_iou = params.eval_iou
    claimed: set[int] = set()
    statuses: dict[int, ClusterStatus] = {}
    for _, cluster_id, cluster, rep in order:
        best = None
        for value, gt_id in iou_cache[rep.detection_id]:
            if gt_id not in claimed:
                best = (value, gt_id)
                break
        if best is not None and best[0] >= eval_iou:
            claimed.add(best[1])
            statuses[cluster_id] = ClusterStatus(
                cluster_id=cluster_id,
                status=STATUS_TP,
                matched_gt=best[1],
                match_iou=best[0],
            )
        else:
            statuses[cluster_id] = ClusterStatus(cluster_id=cluster_id, status=STATUS_FP)
    return [statuses[c.cluster_id] for c in clusters]


def evaluate_model(
    model_id: str,
    detections: list[Detection],
    ground_truth: list[GroundTruthObject],
    eval_iou: float,
    iou_cache: IouCache | None = None,
) -> ModelEvaluation:
    """Standard single-model greedy matching: descending confidence, each
    ground-truth object claims at most one detection. Unclaimed ground truth
    counts as false negatives."""
    own = [d for d in detections if d.model_id == model_id]
    if iou_cache is None:
        iou_cache = build_iou_cache(own, ground_truth)
    order = sorted(own, key=lambda d: (-d.confidence, d.detection_id))

    claimed: set[int] = set()
    statuses: dict[int, DetectionStatus] = {}
    for det in order:
        best = next(
            ((value, gt_id) for value, gt_id in iou_cache[det.detection_id] if gt_id not in claimed),
            None,
        )
        if best is not None and best[0] >= eval_iou:
            claimed.add(best[1])
            statuses[det.detection_id] = DetectionStatus(
                detection_id=det.detection_id, status=STATUS_TP, matched_gt=best[1], match_iou=best[0]
            )
        else:
            statuses[det.detection_id] = DetectionStatus(detection_id=det.detection_id, status=STATUS_FP)
    return ModelEvaluation(
        model_id=model_id,
        statuses=tuple(statuses[d.detection_id] for d in own),
        fn_count=len(ground_truth) - len(claimed),
    )


def warn_if_thresholds_inverted(set_iou: float, eval_iou: float) -> None:
    """The set threshold matches predictions to each other, not to ground
    truth, so it should normally sit below the evaluation threshold."""
    if eval_iou < set_iou:
        logger.warning(
            "eval_iou %.3g is below the artifact's set_iou %.3g; agreement sets were "
            "formed with looser overlap than the evaluation demands",
            eval_iou,
            set_iou,
        )


def build_set_artifact(
    dataset: RawDataset,
    set_iou: float,
    source_folder: str = "",
    created_at: str | None = None,
) -> SetArtifact:
    """Compute the edge cache and assemble the persistable artifact."""
    edges = compute_edges(dataset, set_iou)
    if created_at is None:
        created_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return SetArtifact(
        raw=dataset,
        set_iou=set_iou,
        edges=edges,
        build=BuildMetadata(tool_version=__version__, created_at=created_at, source_folder=str(source_folder)),
    )
