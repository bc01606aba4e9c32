"""modelsets: compare object-detection (and other) models by clustering their
agreeing predictions into sets and evaluating the sets against ground truth."""

__version__ = "0.1.0"

from .errors import ArtifactError, DatasetError, ModelSetsError, TagError  # noqa: E402
from .ingest import (  # noqa: E402
    BoundingBox,
    Detection,
    GroundTruthObject,
    RawDataset,
    SetArtifact,
    load_artifact,
    load_dataset,
    validate_dataset,
    write_artifact,
)
from .matching import (  # noqa: E402
    AgreementCluster,
    ClusterStatus,
    EvalParams,
    build_set_artifact,
    compute_edges,
    evaluate_clusters,
    evaluate_model,
    filter_detections,
    generate_clusters,
    iou,
)

__all__ = [
    "__version__",
    "ModelSetsError",
    "DatasetError",
    "ArtifactError",
    "TagError",
    "BoundingBox",
    "Detection",
    "GroundTruthObject",
    "RawDataset",
    "SetArtifact",
    "load_dataset",
    "validate_dataset",
    "load_artifact",
    "write_artifact",
    "build_set_artifact",
    "EvalParams",
    "AgreementCluster",
    "ClusterStatus",
    "iou",
    "filter_detections",
    "compute_edges",
    "generate_clusters",
    "evaluate_clusters",
    "evaluate_model",
]
