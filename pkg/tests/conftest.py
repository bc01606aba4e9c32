"""Shared fixtures: a small hand-traceable dataset, a synthetic fixture where
equal precision hides different behavior, a 10k-detection fixture for latency
work, and randomized instance generators."""

from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

from modelsets.ingest import (
    BoundingBox,
    Detection,
    GroundTruthObject,
    ImageInfo,
    RawDataset,
    load_dataset,
)
from modelsets.matching import build_set_artifact

FIXED_TIMESTAMP = "2026-01-01T00:00:00+00:00"

# Verdict lines recorded by the acceptance tests; printed as a terminal
# section at the end of the run so they survive output capture.
ACCEPTANCE_LINES: list[tuple[str, bool, str]] = []


def record_acceptance(name: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append((name, ok, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


def write_dataset(
    root: Path,
    models: dict[str, list[dict]],
    ground_truth: list[dict],
    images: list[dict],
    with_image_files: bool = False,
) -> Path:
    """Materialize a dataset folder from record dicts."""
    root.mkdir(parents=True, exist_ok=True)
    (root / "images.json").write_text(json.dumps(images), encoding="utf-8")
    (root / "groundtruth.json").write_text(json.dumps(ground_truth), encoding="utf-8")
    for model_id, records in models.items():
        (root / f"{model_id}.json").write_text(json.dumps(records), encoding="utf-8")
    if with_image_files:
        for record in images:
            (root / record["file"]).write_bytes(f"bytes-of-{record['image_id']}".encode())
    return root


def det_record(image_id: str, bbox: list[float], confidence: float, cls: str = "desk") -> dict:
    return {"image_id": image_id, "bbox": bbox, "class": cls, "confidence": confidence}


def gt_record(image_id: str, bbox: list[float], cls: str = "desk") -> dict:
    return {"image_id": image_id, "bbox": bbox, "class": cls}


DESK_IMAGES = [
    {"image_id": "im0", "file": "im0.jpg", "width": 200, "height": 200},
    {"image_id": "im1", "file": "im1.jpg", "width": 200, "height": 200},
    {"image_id": "im2", "file": "im2.jpg", "width": 200, "height": 200},
]

DESK_GROUND_TRUTH = [
    gt_record("im0", [10, 10, 40, 40]),
    gt_record("im0", [100, 100, 50, 50]),
    gt_record("im1", [20, 20, 60, 60]),
    gt_record("im2", [50, 50, 40, 40]),
]

DESK_MODELS = {
    "modelA": [
        det_record("im0", [12, 11, 38, 40], 0.95),
        det_record("im0", [98, 102, 52, 48], 0.90),
        det_record("im1", [22, 18, 58, 62], 0.80),
        det_record("im2", [140, 140, 30, 30], 0.75),
    ],
    "modelB": [
        det_record("im0", [11, 12, 40, 39], 0.92),
        det_record("im1", [21, 21, 59, 60], 0.85),
        det_record("im2", [139, 141, 31, 29], 0.72),
    ],
    "modelC": [
        det_record("im0", [10, 10, 40, 40], 0.97),
        det_record("im2", [52, 49, 39, 42], 0.88),
        det_record("im1", [120, 120, 20, 20], 0.65),
    ],
}


@pytest.fixture
def desk_folder(tmp_path: Path) -> Path:
    return write_dataset(
        tmp_path / "desk", DESK_MODELS, DESK_GROUND_TRUTH, DESK_IMAGES, with_image_files=True
    )


@pytest.fixture
def desk_dataset(desk_folder: Path) -> RawDataset:
    return load_dataset(desk_folder, "desk")


@pytest.fixture
def desk_artifact(desk_dataset: RawDataset):
    return build_set_artifact(desk_dataset, set_iou=0.3, source_folder="desk", created_at=FIXED_TIMESTAMP)


# ---------------------------------------------------------------------------
# Randomized instances (grid coordinates on purpose: exact IOU ties are common,
# which stresses the deterministic tie-breaks)
# ---------------------------------------------------------------------------


def random_instance(rng: random.Random, max_models: int = 4, max_detections: int = 12) -> list[Detection]:
    n_models = rng.randint(2, max_models)
    n_dets = rng.randint(0, max_detections)
    models = [f"m{i}" for i in range(n_models)]
    images = ["imgA", "imgB"]
    detections = []
    for det_id in range(n_dets):
        detections.append(
            Detection(
                detection_id=det_id,
                model_id=rng.choice(models),
                image_id=rng.choice(images),
                box=BoundingBox(
                    x=float(rng.randint(0, 6)),
                    y=float(rng.randint(0, 6)),
                    w=float(rng.randint(1, 4)),
                    h=float(rng.randint(1, 4)),
                ),
                class_label="obj",
                confidence=round(rng.random(), 3),
            )
        )
    return detections


def dataset_from_detections(detections: list[Detection], with_gt: bool = False, rng=None) -> RawDataset:
    models = sorted({d.model_id for d in detections}) or ["m0", "m1"]
    images = {
        image_id: ImageInfo(file=f"{image_id}.jpg", width=100, height=100)
        for image_id in sorted({d.image_id for d in detections} | {"imgA", "imgB"})
    }
    ground_truth = []
    if with_gt and rng is not None:
        for gt_id in range(rng.randint(0, 6)):
            ground_truth.append(
                GroundTruthObject(
                    gt_id=gt_id,
                    image_id=rng.choice(sorted(images)),
                    box=BoundingBox(
                        x=float(rng.randint(0, 6)),
                        y=float(rng.randint(0, 6)),
                        w=float(rng.randint(1, 4)),
                        h=float(rng.randint(1, 4)),
                    ),
                    class_label="obj",
                )
            )
    return RawDataset(
        models=models,
        images=images,
        detections=detections,
        ground_truth=ground_truth,
        object_class="obj",
    )


# ---------------------------------------------------------------------------
# Equal-precision fixture: three models, identical precision/recall, very
# different agreement structure
# ---------------------------------------------------------------------------


def _box(i: int, row: int) -> list[float]:
    return [i * 90 + 10, row, 50, 50]


def equal_precision_dataset() -> RawDataset:
    """Three models with precision = recall = 0.5 each, where two of them
    (green/yellow) make the same predictions and the third (pink) shares none.
    """
    images = {"scene": ImageInfo(file="scene.jpg", width=1000, height=1000)}
    ground_truth = [
        GroundTruthObject(gt_id=i, image_id="scene", box=BoundingBox(*_box(i, 10)), class_label="obj")
        for i in range(10)
    ]

    def det(det_id: int, model: str, box: list[float], conf: float) -> Detection:
        return Detection(
            detection_id=det_id,
            model_id=model,
            image_id="scene",
            box=BoundingBox(*box),
            class_label="obj",
            confidence=conf,
        )

    detections = []
    next_id = 0
    # green and yellow: the same 5 true boxes (objects 0-4) and the same 4
    # wrong boxes, plus one unique wrong box each
    for model in ("green", "yellow"):
        for i in range(5):
            detections.append(det(next_id, model, _box(i, 10), 0.9))
            next_id += 1
        for j in range(4):
            detections.append(det(next_id, model, _box(j, 200), 0.8))
            next_id += 1
    detections.append(det(next_id, "green", [200, 400, 50, 50], 0.8))
    next_id += 1
    detections.append(det(next_id, "yellow", [10, 400, 50, 50], 0.8))
    next_id += 1
    # pink: 5 true boxes (objects 5-9), 5 wrong boxes disjoint from everything
    for i in range(5, 10):
        detections.append(det(next_id, "pink", _box(i, 10), 0.9))
        next_id += 1
    for j in range(5):
        detections.append(det(next_id, "pink", _box(j, 600), 0.8))
        next_id += 1

    return RawDataset(
        models=["green", "pink", "yellow"],
        images=images,
        detections=detections,
        ground_truth=ground_truth,
        object_class="obj",
    )


@pytest.fixture
def equal_precision_artifact():
    return build_set_artifact(equal_precision_dataset(), set_iou=0.3, created_at=FIXED_TIMESTAMP)


# ---------------------------------------------------------------------------
# 10,000-detection fixture for the latency budget (4 models, 100 images,
# 25 objects per image, every model detecting every object with jitter)
# ---------------------------------------------------------------------------


def large_dataset(n_images: int = 100, objects_per_image: int = 25) -> RawDataset:
    rng = random.Random(20260821)
    models = ["net-a", "net-b", "net-c", "net-d"]
    images = {}
    ground_truth = []
    detections = []
    det_id = 0
    for img_idx in range(n_images):
        image_id = f"img{img_idx:03d}"
        images[image_id] = ImageInfo(file=f"{image_id}.jpg", width=640, height=640)
        for obj_idx in range(objects_per_image):
            gx = 20.0 + (obj_idx % 5) * 120.0
            gy = 20.0 + (obj_idx // 5) * 120.0
            ground_truth.append(
                GroundTruthObject(
                    gt_id=len(ground_truth),
                    image_id=image_id,
                    box=BoundingBox(gx, gy, 40.0, 40.0),
                    class_label="obj",
                )
            )
            for model in models:
                detections.append(
                    Detection(
                        detection_id=det_id,
                        model_id=model,
                        image_id=image_id,
                        box=BoundingBox(
                            gx + rng.uniform(-5, 5),
                            gy + rng.uniform(-5, 5),
                            40.0 + rng.uniform(-4, 4),
                            40.0 + rng.uniform(-4, 4),
                        ),
                        class_label="obj",
                        confidence=round(rng.uniform(0.4, 1.0), 4),
                    )
                )
                det_id += 1
    return RawDataset(
        models=models,
        images=images,
        detections=detections,
        ground_truth=ground_truth,
        object_class="obj",
    )


@pytest.fixture(scope="session")
def large_artifact():
    return build_set_artifact(large_dataset(), set_iou=0.3, created_at=FIXED_TIMESTAMP)
