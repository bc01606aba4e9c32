"""Exclusive-intersection bars, tri-state queries, and tag storage."""

from __future__ import annotations

import itertools
import json
import random
import threading

import pytest

from modelsets.engine import Session
from modelsets.errors import TagError
from modelsets.matching import (
    STATUS_FP,
    STATUS_TP,
    AgreementCluster,
    ClusterStatus,
    EvalParams,
)
from modelsets.query import (
    STATUS_ALL,
    IntersectionBar,
    QuerySpec,
    TagStore,
    aggregate,
    query,
    tag_export,
    tag_export_document,
    tag_store_for_artifact,
    tags_sidecar_path,
)


def _cluster(cid: int, signature: tuple[str, ...]) -> AgreementCluster:
    return AgreementCluster(cluster_id=cid, image_id="img", members=(cid,), signature=signature)


def _status(cid: int, status: str) -> ClusterStatus:
    return ClusterStatus(cluster_id=cid, status=status)


def _random_world(rng: random.Random, models: list[str], n: int):
    """Random clusters with random signatures/statuses for invariant checks."""
    clusters, statuses = [], []
    for cid in range(n):
        size = rng.randint(1, len(models))
        signature = tuple(sorted(rng.sample(models, size)))
        clusters.append(_cluster(cid, signature))
        statuses.append(_status(cid, rng.choice([STATUS_TP, STATUS_FP])))
    return clusters, statuses


class TestAggregate:
    def test_exact_signature_bars(self):
        clusters = [
            _cluster(0, ("A", "B")),
            _cluster(1, ("A", "B")),
            _cluster(2, ("C",)),
        ]
        statuses = [_status(0, STATUS_TP), _status(1, STATUS_FP), _status(2, STATUS_TP)]
        bars = aggregate(clusters, statuses)
        assert [(b.signature, b.total) for b in bars] == [(("A", "B"), 2), (("C",), 1)]
        assert bars[0].tp_count == 1 and bars[0].fp_count == 1
        assert bars[0].cluster_ids == (0, 1)

    def test_subset_signatures_stay_separate(self):
        # a {A} cluster never counts toward the {A, B} bar
        clusters = [_cluster(0, ("A",)), _cluster(1, ("A", "B"))]
        statuses = [_status(0, STATUS_TP), _status(1, STATUS_TP)]
        bars = aggregate(clusters, statuses)
        assert {b.signature for b in bars} == {("A",), ("A", "B")}
        assert all(b.total == 1 for b in bars)

    def test_sort_descending_total_then_signature(self):
        clusters = [
            _cluster(0, ("B",)),
            _cluster(1, ("A",)),
            _cluster(2, ("A", "B")),
            _cluster(3, ("A", "B")),
        ]
        statuses = [_status(i, STATUS_TP) for i in range(4)]
        bars = aggregate(clusters, statuses)
        assert [b.signature for b in bars] == [("A", "B"), ("A",), ("B",)]

    def test_bars_partition_clusters(self):
        rng = random.Random(11)
        for _ in range(30):
            clusters, statuses = _random_world(rng, ["A", "B", "C", "D"], rng.randint(0, 25))
            bars = aggregate(clusters, statuses)
            seen = list(itertools.chain.from_iterable(b.cluster_ids for b in bars))
            assert sorted(seen) == [c.cluster_id for c in clusters]
            assert len(seen) == len(set(seen))
            assert all(b.total == len(b.cluster_ids) for b in bars)

    def test_empty(self):
        assert aggregate([], []) == []


class TestQuery:
    CLUSTERS = [
        _cluster(0, ("A",)),
        _cluster(1, ("A", "B")),
        _cluster(2, ("A", "C")),
        _cluster(3, ("B",)),
    ]
    STATUSES = [
        _status(0, STATUS_TP),
        _status(1, STATUS_FP),
        _status(2, STATUS_TP),
        _status(3, STATUS_FP),
    ]

    def test_include_exclude_neutral(self):
        # Include {A}, Exclude {C}, B neutral
        spec = QuerySpec(include=frozenset({"A"}), exclude=frozenset({"C"}))
        assert query(spec, self.CLUSTERS, self.STATUSES) == [0, 1]

    def test_all_neutral_returns_everything(self):
        assert query(QuerySpec(), self.CLUSTERS, self.STATUSES) == [0, 1, 2, 3]

    def test_status_filter(self):
        spec_tp = QuerySpec(status_filter=STATUS_TP)
        spec_fp = QuerySpec(status_filter=STATUS_FP)
        assert query(spec_tp, self.CLUSTERS, self.STATUSES) == [0, 2]
        assert query(spec_fp, self.CLUSTERS, self.STATUSES) == [1, 3]

    def test_include_requires_superset(self):
        spec = QuerySpec(include=frozenset({"A", "B"}))
        assert query(spec, self.CLUSTERS, self.STATUSES) == [1]

    def test_exclude_all_models_matches_nothing(self):
        spec = QuerySpec(exclude=frozenset({"A", "B", "C"}))
        assert query(spec, self.CLUSTERS, self.STATUSES) == []

    def test_results_ascend(self):
        shuffled = list(reversed(self.CLUSTERS))
        spec = QuerySpec()
        assert query(spec, shuffled, self.STATUSES) == [0, 1, 2, 3]

    def test_query_bar_consistency(self):
        rng = random.Random(13)
        models = ["A", "B", "C", "D"]
        for _ in range(30):
            clusters, statuses = _random_world(rng, models, rng.randint(0, 25))
            bars = aggregate(clusters, statuses)
            for bar in bars:
                spec = QuerySpec(
                    include=frozenset(bar.signature),
                    exclude=frozenset(models) - frozenset(bar.signature),
                )
                assert tuple(query(spec, clusters, statuses)) == bar.cluster_ids

    def test_include_narrowing_monotone(self):
        rng = random.Random(15)
        models = ["A", "B", "C"]
        clusters, statuses = _random_world(rng, models, 40)
        base: frozenset[str] = frozenset()
        previous = set(query(QuerySpec(include=base), clusters, statuses))
        for model in models:
            base = base | {model}
            current = set(query(QuerySpec(include=base), clusters, statuses))
            assert current <= previous
            previous = current

    def test_exclude_narrowing_monotone(self):
        rng = random.Random(16)
        models = ["A", "B", "C"]
        clusters, statuses = _random_world(rng, models, 40)
        base: frozenset[str] = frozenset()
        previous = set(query(QuerySpec(exclude=base), clusters, statuses))
        for model in models:
            base = base | {model}
            current = set(query(QuerySpec(exclude=base), clusters, statuses))
            assert current <= previous
            previous = current

    def test_status_composition(self):
        rng = random.Random(19)
        clusters, statuses = _random_world(rng, ["A", "B", "C"], 40)
        include = frozenset({"A"})
        everything = query(QuerySpec(include=include), clusters, statuses)
        tp = query(QuerySpec(include=include, status_filter=STATUS_TP), clusters, statuses)
        fp = query(QuerySpec(include=include, status_filter=STATUS_FP), clusters, statuses)
        assert sorted(tp + fp) == everything


class TestQuerySpec:
    def test_overlap_rejected(self):
        with pytest.raises(ValueError, match="both included and excluded"):
            QuerySpec(include=frozenset({"A"}), exclude=frozenset({"A", "B"}))

    def test_bad_status_rejected(self):
        with pytest.raises(ValueError, match="status_filter"):
            QuerySpec(status_filter="tps")

    def test_unknown_models_rejected(self):
        spec = QuerySpec(include=frozenset({"A"}), exclude=frozenset({"Z"}))
        with pytest.raises(ValueError, match=r"unknown model ids in query: \['Z'\]"):
            spec.validate_models(["A", "B"])

    def test_known_models_accepted(self):
        QuerySpec(include=frozenset({"A"})).validate_models(["A", "B"])


class TestTagStore:
    def test_assign_and_snapshot(self):
        store = TagStore({"im0", "im1", "im2"})
        result = store.assign("night", ["im1", "im0"])
        assert result == {"im0", "im1"}
        assert store.snapshot() == {"night": ["im0", "im1"]}

    def test_assign_is_idempotent_union(self):
        store = TagStore({"im0", "im1"})
        store.assign("t", ["im0"])
        store.assign("t", ["im0", "im1"])
        store.assign("t", ["im0"])
        assert store.snapshot() == {"t": ["im0", "im1"]}

    def test_unknown_image_rejected(self):
        store = TagStore({"im0"})
        with pytest.raises(TagError, match=r"unknown image ids: \['imX'\]"):
            store.assign("t", ["im0", "imX"])

    def test_empty_name_rejected(self):
        store = TagStore({"im0"})
        for bad in ("", "   "):
            with pytest.raises(TagError, match="non-empty"):
                store.assign(bad, ["im0"])

    def test_remove_memberships_and_tags(self):
        store = TagStore({"im0", "im1"})
        store.assign("t", ["im0", "im1"])
        store.remove("t", ["im0"])
        assert store.snapshot() == {"t": ["im1"]}
        store.remove("t")
        assert store.snapshot() == {}
        with pytest.raises(TagError, match="unknown tag"):
            store.remove("t")

    def test_empty_tag_disappears(self):
        store = TagStore({"im0"})
        store.assign("t", ["im0"])
        store.remove("t", ["im0"])
        assert store.snapshot() == {}

    def test_save_load_round_trip(self, tmp_path):
        path = tmp_path / "artifact.json.tags.json"
        store = TagStore({"im0", "im1"}, path)
        store.assign("b", ["im1"])
        store.assign("a", ["im0", "im1"])
        assert store.dirty
        store.save()
        assert not store.dirty
        assert not path.with_name(path.name + ".tmp").exists()

        fresh = TagStore({"im0", "im1"}, path)
        fresh.load()
        assert fresh.snapshot() == {"a": ["im0", "im1"], "b": ["im1"]}

    def test_load_missing_file_is_empty(self, tmp_path):
        store = TagStore({"im0"}, tmp_path / "absent.tags.json")
        store.load()
        assert store.snapshot() == {}

    def test_load_rejects_malformed(self, tmp_path):
        path = tmp_path / "t.tags.json"
        path.write_text("[]", encoding="utf-8")
        store = TagStore({"im0"}, path)
        with pytest.raises(TagError, match="must contain an object"):
            store.load()
        path.write_text(json.dumps({"t": ["imX"]}), encoding="utf-8")
        with pytest.raises(TagError, match="unknown image ids"):
            store.load()

    def test_save_without_path_rejected(self):
        with pytest.raises(TagError, match="no backing path"):
            TagStore({"im0"}).save()

    def test_concurrent_assign_keeps_all(self):
        images = {f"im{i}" for i in range(64)}
        store = TagStore(images)

        def worker(k: int) -> None:
            for i in range(64):
                store.assign(f"tag{k}", [f"im{i}"])

        threads = [threading.Thread(target=worker, args=(k,)) for k in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        snapshot = store.snapshot()
        assert len(snapshot) == 8
        assert all(len(v) == 64 for v in snapshot.values())


class TestTagSidecar:
    def test_sidecar_path_shape(self):
        assert tags_sidecar_path("/x/sets.json").name == "sets.json.tags.json"

    def test_store_for_artifact_loads_existing(self, desk_artifact, tmp_path):
        artifact_path = tmp_path / "desk.json"
        sidecar = tags_sidecar_path(artifact_path)
        sidecar.write_text(json.dumps({"hard": ["im1"]}), encoding="utf-8")
        store = tag_store_for_artifact(desk_artifact, artifact_path)
        assert store.snapshot() == {"hard": ["im1"]}

    def test_store_without_path(self, desk_artifact):
        store = tag_store_for_artifact(desk_artifact, None)
        assert store.snapshot() == {}

    def test_export_document_includes_files(self, desk_artifact):
        store = tag_store_for_artifact(desk_artifact, None)
        store.assign("review", ["im2", "im0"])
        doc = tag_export_document(store, desk_artifact)
        assert doc == {
            "review": [
                {"image_id": "im0", "file": "im0.jpg"},
                {"image_id": "im2", "file": "im2.jpg"},
            ]
        }

    def test_export_writes_stable_json(self, desk_artifact, tmp_path):
        store = tag_store_for_artifact(desk_artifact, None)
        store.assign("review", ["im0"])
        out = tmp_path / "tags-export.json"
        tag_export(store, desk_artifact, out)
        first = out.read_bytes()
        tag_export(store, desk_artifact, out)
        assert out.read_bytes() == first
        assert json.loads(first) == tag_export_document(store, desk_artifact)


class TestQueryOnRealPipeline:
    """Bars and queries agree on clusters produced by the real matcher."""

    def test_desk_bars(self, desk_artifact):
        session = Session(desk_artifact)
        params = EvalParams(eval_iou=0.5, conf_min=0.7, conf_max=1.0)
        result = session.pipeline(params)
        bars = aggregate(result.clusters, result.statuses)
        assert [(b.signature, b.tp_count, b.fp_count) for b in bars] == [
            (("modelA", "modelB"), 1, 1),
            (("modelA",), 1, 0),
            (("modelA", "modelB", "modelC"), 1, 0),
            (("modelC",), 1, 0),
        ]

    def test_desk_query_bar_consistency(self, desk_artifact):
        session = Session(desk_artifact)
        params = EvalParams(eval_iou=0.5, conf_min=0.0, conf_max=1.0)
        result = session.pipeline(params)
        models = desk_artifact.raw.models
        for bar in aggregate(result.clusters, result.statuses):
            spec = QuerySpec(
                include=frozenset(bar.signature),
                exclude=frozenset(models) - frozenset(bar.signature),
            )
            assert tuple(query(spec, result.clusters, result.statuses)) == bar.cluster_ids
