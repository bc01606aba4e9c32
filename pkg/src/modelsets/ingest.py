"""Dataset loading, validation, and the on-disk artifact format.

Input folder layout (one prediction file per model, plus ground truth and an
image index):

    folder/
      images.json        [{"image_id", "file", "width", "height"}, ...]
      groundtruth.json   [{"image_id", "bbox": [x, y, w, h], "class"}, ...]
      <model_id>.json    [{"image_id", "bbox", "class", "confidence"}, ...]

Boxes are COCO-flavored ``[x, y, w, h]`` in pixels with a top-left origin.
Detection and ground-truth ids are assigned at load time as dense integers in
canonical order (models sorted by id, records in file order), which makes
every downstream ordering rule reproducible from the artifact alone.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ArtifactError, DatasetError

ARTIFACT_FORMAT_VERSION = 1
GROUND_TRUTH_FILE = "groundtruth.json"
IMAGE_INDEX_FILE = "images.json"


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in pixel coordinates, top-left origin."""

    x: float
    y: float
    w: float
    h: float

    @property
    def area(self) -> float:
        return self.w * self.h

    def as_list(self) -> list[float]:
        return [self.x, self.y, self.w, self.h]


@dataclass(frozen=True)
class Detection:
    """One predicted bounding box from one model on one image."""

    detection_id: int
    model_id: str
    image_id: str
    box: BoundingBox
    class_label: str
    confidence: float


@dataclass(frozen=True)
class GroundTruthObject:
    """One human-annotated object."""

    gt_id: int
    image_id: str
    box: BoundingBox
    class_label: str


@dataclass(frozen=True)
class ImageInfo:
    file: str
    width: int
    height: int


@dataclass
class RawDataset:
    """Predictions of >= 2 models plus ground truth, filtered to one class.

    ``models`` carries the canonical model order (lexicographic by model id);
    every tie-break downstream refers to a model's index in this list.
    """

    models: list[str]
    images: dict[str, ImageInfo]
    detections: list[Detection]
    ground_truth: list[GroundTruthObject]
    object_class: str
    # records dropped by the class filter, keyed by source file stem
    dropped_out_of_class: dict[str, int] = field(default_factory=dict)

    def model_index(self) -> dict[str, int]:
        return {m: i for i, m in enumerate(self.models)}


@dataclass(frozen=True)
class BuildMetadata:
    tool_version: str
    created_at: str
    source_folder: str


@dataclass
class SetArtifact:
    """Persisted build product: dataset plus the cached cross-model IOU edges.

    Edges are ``(detection_id_a, detection_id_b, iou)`` tuples for cross-model
    same-image pairs with ``iou >= set_iou``, sorted descending by IOU with the
    canonical tie-break (first endpoint's model index, its detection id, then
    the second endpoint's).
    """

    raw: RawDataset
    set_iou: float
    edges: list[tuple[int, int, float]]
    build: BuildMetadata


# ---------------------------------------------------------------------------
# Folder loading
# ---------------------------------------------------------------------------


def _read_json_file(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"{path.name}: cannot read file: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatasetError(
            f"{path.name}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc


def _read_records(path: Path) -> list:
    data = _read_json_file(path)
    if not isinstance(data, list):
        raise DatasetError(f"{path.name}: expected a top-level JSON list of records")
    return data


def _record_field(record, name, file_name: str, index: int):
    if not isinstance(record, dict) or name not in record:
        raise DatasetError(f"{file_name}: record {index}: missing field '{name}'")
    return record[name]


def _parse_box(raw, file_name: str, index: int) -> BoundingBox:
    if not isinstance(raw, (list, tuple)) or len(raw) != 4:
        raise DatasetError(f"{file_name}: record {index}: bbox must be [x, y, w, h]")
    try:
        x, y, w, h = (float(v) for v in raw)
    except (TypeError, ValueError) as exc:
        raise DatasetError(f"{file_name}: record {index}: bbox values must be numbers") from exc
    if not all(math.isfinite(v) for v in (x, y, w, h)):
        raise DatasetError(f"{file_name}: record {index}: bbox values must be finite")
    if w <= 0 or h <= 0:
        raise DatasetError(f"{file_name}: record {index}: degenerate box (w={w}, h={h})")
    return BoundingBox(x, y, w, h)


def _parse_confidence(raw, file_name: str, index: int) -> float:
    try:
        conf = float(raw)
    except (TypeError, ValueError) as exc:
        raise DatasetError(f"{file_name}: record {index}: confidence must be a number") from exc
    if not math.isfinite(conf) or not 0.0 <= conf <= 1.0:
        raise DatasetError(f"{file_name}: record {index}: confidence {conf} outside [0, 1]")
    return conf


def _load_image_index(path: Path) -> dict[str, ImageInfo]:
    images: dict[str, ImageInfo] = {}
    for i, record in enumerate(_read_records(path)):
        image_id = str(_record_field(record, "image_id", path.name, i))
        if image_id in images:
            raise DatasetError(f"{path.name}: record {i}: duplicate image_id '{image_id}'")
        images[image_id] = ImageInfo(
            file=str(_record_field(record, "file", path.name, i)),
            width=int(_record_field(record, "width", path.name, i)),
            height=int(_record_field(record, "height", path.name, i)),
        )
    return images


def load_dataset(root_path: str | os.PathLike, object_class: str) -> RawDataset:
    """Load a prediction folder, filtered to ``object_class``.

    Model order is lexicographic by model id (the prediction file's stem).
    Detections of other classes are dropped; the per-file drop counts are kept
    on the returned dataset. Any malformed record is fatal.
    """
    root = Path(root_path)
    if not root.is_dir():
        raise DatasetError(f"folder not found: {root}")
    if not object_class:
        raise DatasetError("object class must be non-empty")

    gt_path = root / GROUND_TRUTH_FILE
    if not gt_path.is_file():
        raise DatasetError(f"missing ground-truth file: {gt_path.name}")
    index_path = root / IMAGE_INDEX_FILE
    if not index_path.is_file():
        raise DatasetError(f"missing image index file: {index_path.name}")

    model_files = sorted(
        (p for p in root.glob("*.json") if p.name not in (GROUND_TRUTH_FILE, IMAGE_INDEX_FILE)),
        key=lambda p: p.stem,
    )
    if len(model_files) < 2:
        raise DatasetError(
            f"criterion 1 violated: need at least 2 model prediction files, found {len(model_files)}"
        )

    images = _load_image_index(index_path)
    dropped: dict[str, int] = {}

    ground_truth: list[GroundTruthObject] = []
    gt_dropped = 0
    for i, record in enumerate(_read_records(gt_path)):
        class_label = str(_record_field(record, "class", gt_path.name, i))
        if class_label != object_class:
            gt_dropped += 1
            continue
        image_id = str(_record_field(record, "image_id", gt_path.name, i))
        if image_id not in images:
            raise DatasetError(f"{gt_path.name}: record {i}: unknown image_id '{image_id}'")
        box = _parse_box(_record_field(record, "bbox", gt_path.name, i), gt_path.name, i)
        ground_truth.append(
            GroundTruthObject(gt_id=len(ground_truth), image_id=image_id, box=box, class_label=class_label)
        )
    if gt_dropped:
        dropped["groundtruth"] = gt_dropped

    models = [p.stem for p in model_files]
    if len(set(models)) != len(models):
        raise DatasetError("duplicate model ids among prediction files")

    detections: list[Detection] = []
    next_id = 0
    for path in model_files:
        model_id = path.stem
        model_dropped = 0
        for i, record in enumerate(_read_records(path)):
            class_label = str(_record_field(record, "class", path.name, i))
            if class_label != object_class:
                model_dropped += 1
                continue
            image_id = str(_record_field(record, "image_id", path.name, i))
            if image_id not in images:
                raise DatasetError(f"{path.name}: record {i}: unknown image_id '{image_id}'")
            box = _parse_box(_record_field(record, "bbox", path.name, i), path.name, i)
            conf = _parse_confidence(_record_field(record, "confidence", path.name, i), path.name, i)
            detections.append(
                Detection(
                    detection_id=next_id,
                    model_id=model_id,
                    image_id=image_id,
                    box=box,
                    class_label=class_label,
                    confidence=conf,
                )
            )
            next_id += 1
        if model_dropped:
            dropped[model_id] = model_dropped

    return RawDataset(
        models=models,
        images=images,
        detections=detections,
        ground_truth=ground_truth,
        object_class=object_class,
        dropped_out_of_class=dropped,
    )


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    code: str
    subject: tuple
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, subject: tuple, message: str) -> None:
        self.violations.append(Violation(code, subject, message))


def _box_ok(box: BoundingBox) -> bool:
    values = (box.x, box.y, box.w, box.h)
    return all(math.isfinite(v) for v in values) and box.w > 0 and box.h > 0


def validate_dataset(dataset: RawDataset) -> ValidationReport:
    """Check every RawDataset invariant; an empty report means the dataset is valid."""
    report = ValidationReport()
    model_set = set(dataset.models)

    if len(dataset.models) < 2:
        report.add("criterion-1", (), f"need at least 2 models, have {len(dataset.models)}")
    if len(model_set) != len(dataset.models):
        report.add("duplicate-model", (), "model list contains duplicates")

    seen_pairs: set[tuple[str, int]] = set()
    seen_ids: dict[int, str] = {}
    for det in dataset.detections:
        subject = (det.model_id, det.detection_id)
        if det.model_id not in model_set:
            report.add("unknown-model", subject, f"detection from unlisted model '{det.model_id}'")
        if subject in seen_pairs:
            report.add("duplicate-id", subject, "duplicate (model_id, detection_id)")
        elif det.detection_id in seen_ids:
            report.add(
                "duplicate-id",
                subject,
                f"detection_id {det.detection_id} reused across models "
                f"({seen_ids[det.detection_id]} and {det.model_id})",
            )
        seen_pairs.add(subject)
        seen_ids.setdefault(det.detection_id, det.model_id)
        if not math.isfinite(det.confidence) or not 0.0 <= det.confidence <= 1.0:
            report.add("confidence-out-of-range", subject, "confidence out of range")
        if not _box_ok(det.box):
            report.add("bad-box", subject, f"invalid box {det.box.as_list()}")
        if det.image_id not in dataset.images:
            report.add("unknown-image", subject, f"unknown image_id '{det.image_id}'")
        if det.class_label != dataset.object_class:
            report.add(
                "class-mismatch",
                subject,
                f"class '{det.class_label}' differs from artifact class '{dataset.object_class}'",
            )

    seen_gt: set[int] = set()
    for gt in dataset.ground_truth:
        subject = ("groundtruth", gt.gt_id)
        if gt.gt_id in seen_gt:
            report.add("duplicate-id", subject, "duplicate gt_id")
        seen_gt.add(gt.gt_id)
        if not _box_ok(gt.box):
            report.add("bad-box", subject, f"invalid box {gt.box.as_list()}")
        if gt.image_id not in dataset.images:
            report.add("unknown-image", subject, f"unknown image_id '{gt.image_id}'")

    return report


# ---------------------------------------------------------------------------
# Artifact serialization
# ---------------------------------------------------------------------------


def artifact_to_document(artifact: SetArtifact) -> dict:
    raw = artifact.raw
    return {
        "format_version": ARTIFACT_FORMAT_VERSION,
        "object_class": raw.object_class,
        "set_iou": artifact.set_iou,
        "models": list(raw.models),
        "images": [
            {"image_id": image_id, "file": info.file, "width": info.width, "height": info.height}
            for image_id, info in raw.images.items()
        ],
        "detections": [
            {
                "detection_id": d.detection_id,
                "model_id": d.model_id,
                "image_id": d.image_id,
                "bbox": d.box.as_list(),
                "class": d.class_label,
                "confidence": d.confidence,
            }
            for d in raw.detections
        ],
        "ground_truth": [
            {"gt_id": g.gt_id, "image_id": g.image_id, "bbox": g.box.as_list(), "class": g.class_label}
            for g in raw.ground_truth
        ],
        "edges": [[a, b, value] for a, b, value in artifact.edges],
        "dropped_out_of_class": dict(raw.dropped_out_of_class),
        "build": {
            "tool_version": artifact.build.tool_version,
            "created_at": artifact.build.created_at,
            "source_folder": artifact.build.source_folder,
        },
    }


def _require(doc: dict, key: str):
    if key not in doc:
        raise ArtifactError(f"corrupted artifact: missing field '{key}'")
    return doc[key]


def document_to_artifact(doc) -> SetArtifact:
    if not isinstance(doc, dict):
        raise ArtifactError("corrupted artifact: top level must be an object")
    version = _require(doc, "format_version")
    if version != ARTIFACT_FORMAT_VERSION:
        raise ArtifactError(
            f"artifact format version {version} not supported (this tool reads version {ARTIFACT_FORMAT_VERSION})"
        )
    try:
        images = {
            rec["image_id"]: ImageInfo(rec["file"], rec["width"], rec["height"])
            for rec in _require(doc, "images")
        }
        detections = [
            Detection(
                detection_id=rec["detection_id"],
                model_id=rec["model_id"],
                image_id=rec["image_id"],
                box=BoundingBox(*rec["bbox"]),
                class_label=rec["class"],
                confidence=rec["confidence"],
            )
            for rec in _require(doc, "detections")
        ]
        ground_truth = [
            GroundTruthObject(
                gt_id=rec["gt_id"],
                image_id=rec["image_id"],
                box=BoundingBox(*rec["bbox"]),
                class_label=rec["class"],
            )
            for rec in _require(doc, "ground_truth")
        ]
        edges = [(a, b, value) for a, b, value in _require(doc, "edges")]
        build_doc = _require(doc, "build")
        build = BuildMetadata(
            tool_version=build_doc["tool_version"],
            created_at=build_doc["created_at"],
            source_folder=build_doc["source_folder"],
        )
        raw = RawDataset(
            models=list(_require(doc, "models")),
            images=images,
            detections=detections,
            ground_truth=ground_truth,
            object_class=_require(doc, "object_class"),
            dropped_out_of_class=dict(doc.get("dropped_out_of_class", {})),
        )
        artifact = SetArtifact(raw=raw, set_iou=_require(doc, "set_iou"), edges=edges, build=build)
    except (KeyError, TypeError, ValueError) as exc:
        raise ArtifactError(f"corrupted artifact: {exc}") from exc
    _check_edge_invariants(artifact)
    return artifact


def _check_edge_invariants(artifact: SetArtifact) -> None:
    by_id = {d.detection_id: d for d in artifact.raw.detections}
    previous = math.inf
    for a, b, value in artifact.edges:
        if a not in by_id or b not in by_id:
            raise ArtifactError(f"corrupted artifact: edge ({a}, {b}) references unknown detection")
        det_a, det_b = by_id[a], by_id[b]
        if det_a.model_id == det_b.model_id:
            raise ArtifactError(f"corrupted artifact: edge ({a}, {b}) pairs detections of one model")
        if det_a.image_id != det_b.image_id:
            raise ArtifactError(f"corrupted artifact: edge ({a}, {b}) crosses images")
        if value < artifact.set_iou:
            raise ArtifactError(f"corrupted artifact: edge ({a}, {b}) IOU {value} below set_iou")
        if value > previous:
            raise ArtifactError("corrupted artifact: edges not sorted by descending IOU")
        previous = value


def dumps_artifact(artifact: SetArtifact) -> str:
    """Canonical serialization; identical artifacts produce identical bytes."""
    return json.dumps(artifact_to_document(artifact), indent=2, ensure_ascii=False) + "\n"


def write_artifact(artifact: SetArtifact, path: str | os.PathLike) -> None:
    target = Path(path)
    if not target.parent.is_dir():
        raise ArtifactError(f"parent directory does not exist: {target.parent}")
    target.write_text(dumps_artifact(artifact), encoding="utf-8")


def load_artifact(path: str | os.PathLike) -> SetArtifact:
    source = Path(path)
    try:
        text = source.read_text(encoding="utf-8")
    except OSError as exc:
        raise ArtifactError(f"cannot read artifact: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"corrupted artifact: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return document_to_artifact(doc)
