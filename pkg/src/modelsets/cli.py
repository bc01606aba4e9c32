"""Command-line surface: artifact building, the HTTP service, and headless
equivalents of the read endpoints.

The headless commands (`query`, `metrics`, `export-tags`) call the same
session methods as the service and print the same documents, canonically
serialized, so scripted use and the browser UI can never disagree.

Exit codes: 0 success; 1 runtime failure (bad dataset, unreadable artifact);
2 argument validation (unknown flags, out-of-range thresholds, missing paths).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .engine import Session
from .errors import ModelSetsError
from .groups import (
    align_clusterings,
    load_labels_table,
    load_predictions_table,
    match_classification,
    match_regression_table,
)
from .ingest import load_artifact, load_dataset, validate_dataset, write_artifact
from .matching import EvalParams, build_set_artifact
from .query import QuerySpec, tag_export_document

DEFAULT_SET_IOU = 0.3
DEFAULT_PARAMS = EvalParams(eval_iou=0.5, conf_min=0.7, conf_max=1.0)

ENV_HOST = "MODELSETS_HOST"
ENV_PORT = "MODELSETS_PORT"
ENV_IMAGE_ROOT = "MODELSETS_IMAGE_ROOT"


def _dump(document: dict, out: str | None) -> None:
    payload = json.dumps(document, indent=2, ensure_ascii=False) + "\n"
    if out is None:
        sys.stdout.write(payload)
    else:
        Path(out).write_text(payload, encoding="utf-8")


def _split_models(value: str | None) -> frozenset[str]:
    if not value:
        return frozenset()
    return frozenset(part.strip() for part in value.split(",") if part.strip())


def _session(parser: argparse.ArgumentParser, artifact_path: str) -> Session:
    try:
        artifact = load_artifact(artifact_path)
    except ModelSetsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(1) from None
    return Session(artifact, artifact_path)


def _params_from_args(args: argparse.Namespace) -> EvalParams:
    return EvalParams(
        eval_iou=DEFAULT_PARAMS.eval_iou if args.eval_iou is None else args.eval_iou,
        conf_min=DEFAULT_PARAMS.conf_min if args.conf_min is None else args.conf_min,
        conf_max=DEFAULT_PARAMS.conf_max if args.conf_max is None else args.conf_max,
    )


def _add_params_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--eval-iou", type=float, default=None, help="ground-truth IOU threshold (default 0.5)")
    sub.add_argument("--conf-min", type=float, default=None, help="lower confidence bound (default 0.7)")
    sub.add_argument("--conf-max", type=float, default=None, help="upper confidence bound (default 1.0)")


def cmd_build(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    folder = Path(args.folder)
    if not folder.is_dir():
        parser.error(f"folder not found: {folder}")
    if not 0.0 < args.set_iou <= 1.0:
        parser.error(f"set-iou out of range (need 0 < value <= 1): {args.set_iou}")

    try:
        dataset = load_dataset(folder, args.object_class)
        report = validate_dataset(dataset)
        if not report.ok:
            for violation in report.violations:
                print(f"error [{violation.code}]: {violation.message}", file=sys.stderr)
            return 1
        artifact = build_set_artifact(dataset, args.set_iou, source_folder=str(folder))
        write_artifact(artifact, args.out)
    except ModelSetsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    raw = dataset
    per_model = {m: 0 for m in raw.models}
    for det in raw.detections:
        per_model[det.model_id] += 1
    model_counts = ", ".join(f"{m}: {n}" for m, n in per_model.items())
    dropped = sum(raw.dropped_out_of_class.values())
    print(f"artifact written to {args.out}")
    print(f"object class: {raw.object_class}")
    print(f"models ({len(raw.models)}): {', '.join(raw.models)}")
    print(f"images: {len(raw.images)}")
    print(f"detections: {len(raw.detections)} ({model_counts})")
    print(f"ground truth: {len(raw.ground_truth)}")
    print(f"edges (set_iou {args.set_iou:g}): {len(artifact.edges)}")
    if dropped:
        print(f"dropped out-of-class records: {dropped}")
    return 0


def cmd_serve(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    import uvicorn

    from .server import ServiceConfig, create_app, freeze_startup_heap

    session = _session(parser, args.artifact)
    config = ServiceConfig(
        artifact_path=args.artifact,
        host=args.host,
        port=args.port,
        image_root=args.image_root,
        static_dir=args.static_dir,
    )
    app = create_app(session, config)
    freeze_startup_heap()
    print(f"serving {args.artifact} on http://{config.host}:{config.port}")
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    return 0


def cmd_query(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    session = _session(parser, args.artifact)
    try:
        spec = QuerySpec(
            include=_split_models(args.include),
            exclude=_split_models(args.exclude),
            status_filter=args.status,
            params=_params_from_args(args),
        )
        document = session.query_payload(spec)
    except ValueError as exc:
        parser.error(str(exc))
    _dump(document, args.out)
    return 0


def cmd_metrics(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    session = _session(parser, args.artifact)
    try:
        document = session.metrics_payload(_params_from_args(args))
    except ValueError as exc:
        parser.error(str(exc))
    except ModelSetsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _dump(document, args.out)
    return 0


def cmd_export_tags(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    session = _session(parser, args.artifact)
    document = tag_export_document(session.tags, session.artifact)
    _dump(document, args.out)
    return 0


def cmd_groups(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    try:
        preds = load_predictions_table(args.predictions)
        if args.task == "classification":
            gt = load_labels_table(args.labels) if args.labels else None
            groups = match_classification(preds, gt)
            document: dict = {"task": args.task}
        elif args.task == "regression":
            if args.epsilon is None:
                parser.error("--epsilon is required for regression grouping")
            groups = match_regression_table(preds, args.epsilon)
            document = {"task": args.task, "epsilon": args.epsilon}
        else:  # clustering
            models = sorted({p.model_id for p in preds})
            if len(models) != 2:
                print(
                    f"error: clustering alignment needs exactly 2 models, found {len(models)}",
                    file=sys.stderr,
                )
                return 1
            labels_a = {p.item_id: p.label for p in preds if p.model_id == models[0]}
            labels_b = {p.item_id: p.label for p in preds if p.model_id == models[1]}
            mapping, groups = align_clusterings(labels_a, labels_b, models[0], models[1])
            document = {"task": args.task, "mapping": mapping}
    except ValueError as exc:
        parser.error(str(exc))
    except ModelSetsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    document["groups"] = [
        {
            "item_id": g.item_id,
            "signature": list(g.signature),
            "consensus": g.consensus,
            "correctness": g.correctness,
        }
        for g in groups
    ]
    _dump(document, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modelsets",
        description="Compare object-detection models through agreement sets.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", help="ingest a prediction folder and write a set artifact")
    build.add_argument("--folder", required=True, help="dataset folder (model JSONs + groundtruth + images index)")
    build.add_argument("--class", dest="object_class", required=True, help="object class to keep")
    build.add_argument("--set-iou", type=float, default=DEFAULT_SET_IOU, help="agreement IOU threshold (default 0.3)")
    build.add_argument("--out", required=True, help="artifact output path")
    build.set_defaults(func=cmd_build)

    serve = sub.add_parser("serve", help="serve an artifact over HTTP for the explorer UI")
    serve.add_argument("--artifact", required=True)
    serve.add_argument("--host", default=os.environ.get(ENV_HOST, "127.0.0.1"))
    serve.add_argument("--port", type=int, default=int(os.environ.get(ENV_PORT, "8000")))
    serve.add_argument("--image-root", default=os.environ.get(ENV_IMAGE_ROOT), help="folder with the image files")
    serve.add_argument("--static-dir", default=None, help="built explorer UI to serve at /")
    serve.set_defaults(func=cmd_serve)

    query = sub.add_parser("query", help="run a tri-state signature query against an artifact")
    query.add_argument("--artifact", required=True)
    query.add_argument("--include", default="", help="comma-separated models that must be in the signature")
    query.add_argument("--exclude", default="", help="comma-separated models that must be absent")
    query.add_argument("--status", choices=["all", "tp", "fp"], default="all")
    _add_params_flags(query)
    query.add_argument("--out", default=None, help="write the document here instead of stdout")
    query.set_defaults(func=cmd_query)

    metrics = sub.add_parser("metrics", help="per-model scores plus similarity matrices")
    metrics.add_argument("--artifact", required=True)
    _add_params_flags(metrics)
    metrics.add_argument("--out", default=None)
    metrics.set_defaults(func=cmd_metrics)

    export = sub.add_parser("export-tags", help="write the tag export document")
    export.add_argument("--artifact", required=True)
    export.add_argument("--out", default=None)
    export.set_defaults(func=cmd_export_tags)

    groups = sub.add_parser("groups", help="agreement groups for labels, values, or clusterings")
    groups.add_argument("--task", choices=["classification", "regression", "clustering"], required=True)
    groups.add_argument("--predictions", required=True, help="JSON records {model_id, item_id, label-or-value}")
    groups.add_argument("--labels", default=None, help="ground-truth labels for classification")
    groups.add_argument("--epsilon", type=float, default=None, help="regression agreement distance")
    groups.add_argument("--out", default=None)
    groups.set_defaults(func=cmd_groups)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(parser, args)


if __name__ == "__main__":
    sys.exit(main())
