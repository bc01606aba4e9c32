"""Exclusive-intersection aggregation, tri-state querying, and image tagging.

A chart bar exists for each *exact* model signature present in the clustering
(distinct-intersection semantics): a cluster where models A and B agree counts
under the {A, B} bar only, never under {A} or {B}. Broader "contains A"
questions are asked through queries, where each model is independently set to
Include (signature must contain it), Exclude (signature must not), or Neutral
(no constraint).
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .errors import TagError
from .ingest import SetArtifact
from .matching import STATUS_FP, STATUS_TP, AgreementCluster, ClusterStatus, EvalParams

STATUS_ALL = "all"
STATUS_FILTERS = (STATUS_ALL, STATUS_TP, STATUS_FP)


@dataclass(frozen=True)
class IntersectionBar:
    """One chart bar: every cluster whose signature is exactly this one,
    split into true/false positives."""

    signature: tuple[str, ...]
    tp_count: int
    fp_count: int
    cluster_ids: tuple[int, ...]

    @property
    def total(self) -> int:
        return self.tp_count + self.fp_count


@dataclass(frozen=True)
class QuerySpec:
    """Tri-state model constraints plus a TP/FP filter.

    Models named in ``include`` must appear in a matching cluster's signature;
    models in ``exclude`` must not; every other model is neutral. The two sets
    must be disjoint.
    """

    include: frozenset[str] = frozenset()
    exclude: frozenset[str] = frozenset()
    status_filter: str = STATUS_ALL
    params: EvalParams = field(default_factory=EvalParams)

    def __post_init__(self) -> None:
        overlap = self.include & self.exclude
        if overlap:
            raise ValueError(f"models cannot be both included and excluded: {sorted(overlap)}")
        if self.status_filter not in STATUS_FILTERS:
            raise ValueError(f"status_filter must be one of {STATUS_FILTERS}, got {self.status_filter!r}")

    def validate_models(self, models: list[str]) -> None:
        """Reject constraints naming models the artifact does not contain."""
        known = set(models)
        unknown = sorted((self.include | self.exclude) - known)
        if unknown:
            raise ValueError(f"unknown model ids in query: {unknown}")


def aggregate(clusters: list[AgreementCluster], statuses: list[ClusterStatus]) -> list[IntersectionBar]:
    """Group clusters by exact signature into bars, sorted by descending
    total count (ties by signature)."""
    status_of = {s.cluster_id: s.status for s in statuses}
    by_signature: dict[tuple[str, ...], list[AgreementCluster]] = {}
    for cluster in clusters:
        by_signature.setdefault(cluster.signature, []).append(cluster)

    bars = []
    for signature, members in by_signature.items():
        tp = sum(1 for c in members if status_of[c.cluster_id] == STATUS_TP)
        bars.append(
            IntersectionBar(
                signature=signature,
                tp_count=tp,
                fp_count=len(members) - tp,
                cluster_ids=tuple(sorted(c.cluster_id for c in members)),
            )
        )
    bars.sort(key=lambda b: (-b.total, b.signature))
    return bars


def query(
    spec: QuerySpec,
    clusters: list[AgreementCluster],
    statuses: list[ClusterStatus],
) -> list[int]:
    """Cluster ids satisfying the tri-state constraints and status filter,
    ascending."""
    status_of = {s.cluster_id: s.status for s in statuses}
    result = []
    for cluster in clusters:
        signature = set(cluster.signature)
        if not spec.include <= signature:
            continue
        if spec.exclude & signature:
            continue
        if spec.status_filter != STATUS_ALL and status_of[cluster.cluster_id] != spec.status_filter:
            continue
        result.append(cluster.cluster_id)
    return sorted(result)


class TagStore:
    """Named sets of image ids, persisted beside the artifact.

    All mutation goes through a single lock; writes replace the sidecar file
    atomically (write to a temporary file, then rename) so readers never see a
    torn state. Reads return snapshots.
    """

    def __init__(self, known_images: set[str], path: Path | None = None) -> None:
        self._known_images = set(known_images)
        self._path = path
        self._tags: dict[str, set[str]] = {}
        self._dirty = False
        self._lock = threading.Lock()

    @property
    def dirty(self) -> bool:
        return self._dirty

    def assign(self, tag_name: str, image_ids: list[str]) -> set[str]:
        """Add images to a tag (creating it if new); returns the tag's
        resulting image set. Re-assigning an image is a no-op."""
        if not tag_name or not tag_name.strip():
            raise TagError("tag name must be non-empty")
        unknown = sorted(i for i in image_ids if i not in self._known_images)
        if unknown:
            raise TagError(f"unknown image ids: {unknown}")
        with self._lock:
            images = self._tags.setdefault(tag_name, set())
            before = len(images)
            images.update(image_ids)
            if len(images) != before or before == 0:
                self._dirty = True
            return set(images)

    def remove(self, tag_name: str, image_ids: list[str] | None = None) -> None:
        """Drop whole tags (image_ids None) or individual memberships."""
        with self._lock:
            if tag_name not in self._tags:
                raise TagError(f"unknown tag: {tag_name!r}")
            if image_ids is None:
                del self._tags[tag_name]
            else:
                self._tags[tag_name] -= set(image_ids)
                if not self._tags[tag_name]:
                    del self._tags[tag_name]
            self._dirty = True

    def snapshot(self) -> dict[str, list[str]]:
        """Current tags as {name: sorted image ids}."""
        with self._lock:
            return {name: sorted(images) for name, images in sorted(self._tags.items())}

    def save(self) -> None:
        """Persist to the sidecar path, atomically."""
        if self._path is None:
            raise TagError("tag store has no backing path")
        with self._lock:
            doc = {name: sorted(images) for name, images in sorted(self._tags.items())}
            payload = json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
            tmp = self._path.with_name(self._path.name + ".tmp")
            tmp.write_text(payload, encoding="utf-8")
            os.replace(tmp, self._path)
            self._dirty = False

    def load(self) -> None:
        """Replace in-memory tags with the sidecar file's content (missing
        file means no tags)."""
        if self._path is None:
            raise TagError("tag store has no backing path")
        try:
            doc = json.loads(self._path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            return
        except json.JSONDecodeError as exc:
            raise TagError(f"tag file {self._path.name} is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise TagError(f"tag file {self._path.name} must contain an object")
        with self._lock:
            self._tags = {}
            for name, images in doc.items():
                if not name or not isinstance(images, list):
                    raise TagError(f"tag file {self._path.name} has a malformed entry: {name!r}")
                unknown = sorted(i for i in images if i not in self._known_images)
                if unknown:
                    raise TagError(f"tag {name!r} references unknown image ids: {unknown}")
                self._tags[name] = set(images)
            self._dirty = False


def tags_sidecar_path(artifact_path: str | Path) -> Path:
    """Where a given artifact's tags live: ``<artifact>.tags.json``."""
    artifact_path = Path(artifact_path)
    return artifact_path.with_name(artifact_path.name + ".tags.json")


def tag_store_for_artifact(artifact: SetArtifact, artifact_path: str | Path | None) -> TagStore:
    """A store keyed to the artifact's images, loaded from its sidecar when
    one exists."""
    path = tags_sidecar_path(artifact_path) if artifact_path is not None else None
    store = TagStore(set(artifact.raw.images), path)
    if path is not None and path.exists():
        store.load()
    return store


def tag_assign(store: TagStore, tag_name: str, image_ids: list[str]) -> TagStore:
    """Functional-style wrapper over :meth:`TagStore.assign`."""
    store.assign(tag_name, image_ids)
    return store


def tag_export_document(store: TagStore, artifact: SetArtifact) -> dict[str, list[dict[str, str]]]:
    """Export form: tag name -> [{image_id, file}], all orderings sorted."""
    return {
        name: [{"image_id": i, "file": artifact.raw.images[i].file} for i in images]
        for name, images in store.snapshot().items()
    }


def tag_export(store: TagStore, artifact: SetArtifact, path: str | Path) -> None:
    """Write the export document as stable, human-diffable JSON."""
    doc = tag_export_document(store, artifact)
    payload = json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(payload, encoding="utf-8")
    os.replace(tmp, path)
