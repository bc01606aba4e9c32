"""Agreement-set generation for non-detection prediction types: classification
label agreement, regression value proximity, and pairwise clustering alignment.

These matchers share the detection pipeline's vocabulary — each emitted group
carries a model signature and, when ground truth is supplied, a TP/FP verdict —
so the same intersection aggregation applies to any of them. For a fixed item
the emitted groups always partition the models that predicted it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DatasetError
from .matching import STATUS_FP, STATUS_TP


@dataclass(frozen=True)
class LabeledPrediction:
    """One model's prediction for one item: a class label, a regression value,
    or a cluster label, depending on the task."""

    model_id: str
    item_id: str
    label: str | float | int

    def __post_init__(self) -> None:
        if not self.model_id:
            raise ValueError("model_id must be non-empty")
        if not self.item_id:
            raise ValueError("item_id must be non-empty")


@dataclass(frozen=True)
class AgreementGroup:
    """A block of models that agree on one item, with a summary of what they
    agreed on and, when checkable, whether the agreement was correct."""

    item_id: str
    signature: tuple[str, ...]  # model ids, canonical order
    consensus: str | float | int
    correctness: str | None = None  # STATUS_TP / STATUS_FP when ground truth given

    def __post_init__(self) -> None:
        if not self.signature:
            raise ValueError("signature must be non-empty")


def _prediction_matrix(preds: Iterable[LabeledPrediction]) -> dict[str, dict[str, Any]]:
    """Index predictions as item -> model -> label, enforcing one prediction
    per (model, item) and a complete matrix (every model predicts every item)."""
    by_item: dict[str, dict[str, Any]] = {}
    models: set[str] = set()
    for p in preds:
        row = by_item.setdefault(p.item_id, {})
        if p.model_id in row:
            raise DatasetError(f"duplicate prediction for model {p.model_id!r}, item {p.item_id!r}")
        row[p.model_id] = p.label
        models.add(p.model_id)
    for item_id in sorted(by_item):
        missing = models - by_item[item_id].keys()
        if missing:
            raise DatasetError(
                f"criterion 2 violated: incomplete prediction matrix; "
                f"model {sorted(missing)[0]!r} has no prediction for item {item_id!r}"
            )
    return by_item


def match_classification(
    preds: Iterable[LabeledPrediction],
    gt: Mapping[str, Any] | None = None,
) -> list[AgreementGroup]:
    """Group models by identical predicted label, item by item.

    Every model must predict every item. With ground truth (item -> true
    label), a group is a true positive iff its shared label equals the item's
    true label. Groups come back sorted by (item, signature).
    """
    by_item = _prediction_matrix(preds)
    groups: list[AgreementGroup] = []
    for item_id in sorted(by_item):
        blocks: dict[Any, list[str]] = {}
        for model_id, label in by_item[item_id].items():
            blocks.setdefault(label, []).append(model_id)
        item_groups = []
        for label, members in blocks.items():
            correctness = None
            if gt is not None:
                if item_id not in gt:
                    raise DatasetError(f"ground truth has no label for item {item_id!r}")
                correctness = STATUS_TP if label == gt[item_id] else STATUS_FP
            item_groups.append(
                AgreementGroup(
                    item_id=item_id,
                    signature=tuple(sorted(members)),
                    consensus=label,
                    correctness=correctness,
                )
            )
        item_groups.sort(key=lambda g: g.signature)
        groups.extend(item_groups)
    return groups


def match_regression(preds: Iterable[LabeledPrediction], epsilon: float) -> list[AgreementGroup]:
    """Group one item's regression values by chained proximity.

    Values are sorted ascending (ties by model id order) and consecutive values
    whose gap is at most ``epsilon`` are linked into one group, so a group's
    members form a chain of near neighbors rather than a bounded-diameter ball.
    The consensus reported for a group is the mean of its values.
    """
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    preds = list(preds)
    if not preds:
        return []
    item_ids = {p.item_id for p in preds}
    if len(item_ids) > 1:
        raise ValueError(f"predictions span multiple items: {sorted(item_ids)}")
    item_id = preds[0].item_id

    model_order = {m: i for i, m in enumerate(sorted({p.model_id for p in preds}))}
    if len(model_order) != len(preds):
        raise DatasetError(f"duplicate prediction for item {item_id!r}")
    ordered = sorted(preds, key=lambda p: (float(p.label), model_order[p.model_id]))

    chains: list[list[LabeledPrediction]] = [[ordered[0]]]
    for prev, cur in zip(ordered, ordered[1:]):
        if float(cur.label) - float(prev.label) <= epsilon:
            chains[-1].append(cur)
        else:
            chains.append([cur])

    return [
        AgreementGroup(
            item_id=item_id,
            signature=tuple(sorted(p.model_id for p in chain)),
            consensus=sum(float(p.label) for p in chain) / len(chain),
        )
        for chain in chains
    ]


def match_regression_table(preds: Iterable[LabeledPrediction], epsilon: float) -> list[AgreementGroup]:
    """Apply :func:`match_regression` to every item of a complete table."""
    by_item = _prediction_matrix(preds)
    groups: list[AgreementGroup] = []
    for item_id in sorted(by_item):
        row = [
            LabeledPrediction(model_id=m, item_id=item_id, label=v)
            for m, v in by_item[item_id].items()
        ]
        groups.extend(match_regression(row, epsilon))
    return groups


def _canonical_form(labels: Mapping[str, Any]) -> tuple[str, ...]:
    return tuple(str(labels[item]) for item in sorted(labels, key=str))


def _max_overlap(counts: np.ndarray) -> int:
    if counts.size == 0:
        return 0
    rows, cols = linear_sum_assignment(counts, maximize=True)
    return int(counts[rows, cols].sum())


def _lexmin_assignment(counts: np.ndarray) -> dict[int, int]:
    """Maximum-total assignment on the contingency counts; among maximizers,
    pick the one whose column choice is lexicographically smallest row by row
    (rows that cannot be assigned without losing total overlap stay unmatched)."""
    n_rows, n_cols = counts.shape
    target = _max_overlap(counts)
    assigned: dict[int, int] = {}
    fixed = 0
    free_rows = list(range(n_rows))
    free_cols = list(range(n_cols))
    for row in range(n_rows):
        free_rows.remove(row)
        chosen = None
        for col in free_cols:
            rest = fixed + int(counts[row, col]) + _max_overlap(counts[np.ix_(free_rows, [c for c in free_cols if c != col])])
            if rest == target:
                chosen = col
                break
        if chosen is None:
            # row must stay unmatched for the assignment to remain optimal
            if fixed + _max_overlap(counts[np.ix_(free_rows, free_cols)]) != target:
                raise AssertionError("assignment search lost optimality")
            continue
        assigned[row] = chosen
        fixed += int(counts[row, chosen])
        free_cols.remove(chosen)
    return assigned


def _align_oriented(labels_a: Mapping[str, Any], labels_b: Mapping[str, Any]) -> dict[Any, Any]:
    a_labels = sorted({str(v) for v in labels_a.values()})
    b_labels = sorted({str(v) for v in labels_b.values()})
    a_index = {v: i for i, v in enumerate(a_labels)}
    b_index = {v: i for i, v in enumerate(b_labels)}
    counts = np.zeros((len(a_labels), len(b_labels)), dtype=np.int64)
    for item, la in labels_a.items():
        counts[a_index[str(la)], b_index[str(labels_b[item])]] += 1
    assigned = _lexmin_assignment(counts)
    return {a_labels[r]: b_labels[c] for r, c in assigned.items()}


def align_clusterings(
    labels_a: Mapping[str, Any],
    labels_b: Mapping[str, Any],
    model_a: str = "a",
    model_b: str = "b",
) -> tuple[dict[str, str], list[AgreementGroup]]:
    """Align two clusterings of the same items by maximum label co-occurrence.

    Builds the contingency matrix of label pairs and computes the one-to-one
    label assignment with the greatest total overlap (ties resolved toward the
    lexicographically smallest mapping). Items whose labels correspond under
    the mapping yield a two-model agreement group; every other item yields one
    singleton group per model. Swapping the inputs inverts the mapping and
    leaves agreement membership unchanged. Labels are compared by their string
    form, and the returned mapping uses string keys and values.
    """
    if labels_a.keys() != labels_b.keys():
        only_a = sorted(labels_a.keys() - labels_b.keys(), key=str)
        only_b = sorted(labels_b.keys() - labels_a.keys(), key=str)
        raise ValueError(f"labelings cover different items (first side only: {only_a}, second side only: {only_b})")

    # Solve in a canonical orientation so that tie-breaking cannot depend on
    # argument order; the mapping is inverted back if the inputs were swapped.
    swapped = _canonical_form(labels_b) < _canonical_form(labels_a)
    if swapped:
        inverse = _align_oriented(labels_b, labels_a)
        mapping = {v: k for k, v in inverse.items()}
    else:
        mapping = _align_oriented(labels_a, labels_b)

    groups: list[AgreementGroup] = []
    signature_both = tuple(sorted((model_a, model_b)))
    for item in sorted(labels_a, key=str):
        la, lb = str(labels_a[item]), str(labels_b[item])
        if mapping.get(la) == lb:
            groups.append(AgreementGroup(item_id=str(item), signature=signature_both, consensus=la))
        else:
            groups.append(AgreementGroup(item_id=str(item), signature=(model_a,), consensus=la))
            groups.append(AgreementGroup(item_id=str(item), signature=(model_b,), consensus=lb))
    return mapping, groups


def load_predictions_table(path: str | Path) -> list[LabeledPrediction]:
    """Read a JSON array of {model_id, item_id, label-or-value} records."""
    path = Path(path)
    try:
        records = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DatasetError(f"predictions file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path.name} is not valid JSON: {exc}") from None
    if not isinstance(records, list):
        raise DatasetError(f"{path.name}: expected a JSON array of prediction records")
    preds = []
    for i, rec in enumerate(records):
        if not isinstance(rec, dict):
            raise DatasetError(f"{path.name}: record {i} is not an object")
        try:
            model_id = str(rec["model_id"])
            item_id = str(rec["item_id"])
        except KeyError as exc:
            raise DatasetError(f"{path.name}: record {i} missing key {exc.args[0]!r}") from None
        if "label" in rec:
            label: str | float = rec["label"] if isinstance(rec["label"], (int, float)) else str(rec["label"])
        elif "value" in rec:
            label = float(rec["value"])
        else:
            raise DatasetError(f"{path.name}: record {i} has neither 'label' nor 'value'")
        try:
            preds.append(LabeledPrediction(model_id=model_id, item_id=item_id, label=label))
        except ValueError as exc:
            raise DatasetError(f"{path.name}: record {i}: {exc}") from None
    return preds


def load_labels_table(path: str | Path) -> dict[str, Any]:
    """Read a JSON array of {item_id, label} ground-truth records."""
    path = Path(path)
    try:
        records = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DatasetError(f"labels file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path.name} is not valid JSON: {exc}") from None
    if not isinstance(records, list):
        raise DatasetError(f"{path.name}: expected a JSON array of label records")
    labels: dict[str, Any] = {}
    for i, rec in enumerate(records):
        if not isinstance(rec, dict) or "item_id" not in rec or "label" not in rec:
            raise DatasetError(f"{path.name}: record {i} must be an object with 'item_id' and 'label'")
        item_id = str(rec["item_id"])
        if item_id in labels:
            raise DatasetError(f"{path.name}: duplicate label for item {item_id!r}")
        labels[item_id] = rec["label"]
    return labels
