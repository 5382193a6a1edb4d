import datetime

import numpy as np
import pytest

from bpcite.classifier import fit_calibrated
from bpcite.corpus import BindingPrecedent, Document, LoadReport
from bpcite.embedding import fit_pipeline, pipeline_fingerprint
from bpcite.explain import LimeConfig
from bpcite.inference import CitationRecord
from bpcite.store import ProjectStore, StoreError


def _docs():
    return [
        Document("D1", "Rcl 1", "Primeiro corpo de texto.", datetime.date(2012, 3, 1),
                 "min. alfa", "Rcl", frozenset({1})),
        Document("D2", "HC 2", "Segundo corpo, outro texto.", None,
                 "min. beta", "HC", frozenset()),
    ]


def _bps():
    return [
        BindingPrecedent(1, "Enunciado numero um.", datetime.date(2008, 1, 10)),
        BindingPrecedent(2, "Enunciado numero dois.", None),
    ]


def _fitted_clf(fingerprint=""):
    rng = np.random.default_rng(0)
    X = np.vstack([rng.normal(c * 3.0, 0.2, size=(12, 3)) for c in (0, 1)])
    y = np.repeat([1, 2], 12)
    return fit_calibrated(X, y, 1.0, seed=0, embedding_fingerprint=fingerprint)


class TestLock:
    def test_second_lock_fails_while_held(self, tmp_path):
        store = ProjectStore(tmp_path / "s")
        with store.lock():
            with pytest.raises(StoreError, match="locked by another command"):
                with store.lock():
                    pass

    def test_lock_released_after_exit(self, tmp_path):
        store = ProjectStore(tmp_path / "s")
        with store.lock():
            pass
        with store.lock():
            pass

    def test_lock_released_after_error(self, tmp_path):
        store = ProjectStore(tmp_path / "s")
        with pytest.raises(RuntimeError, match="boom"):
            with store.lock():
                raise RuntimeError("boom")
        assert not store.lock_path.exists()


class TestCorpusRoundTrip:
    def test_round_trip(self, tmp_path):
        store = ProjectStore(tmp_path / "s")
        store.save_corpus(_docs(), _bps(), LoadReport())
        docs, bps, _ = store.load_corpus()
        assert [d.doc_id for d in docs] == ["D1", "D2"]
        assert docs[0].date == datetime.date(2012, 3, 1)
        assert docs[1].date is None
        assert docs[0].explicit_bps == frozenset({1})
        assert [b.bp_id for b in bps] == [1, 2]
        assert bps[1].published is None

    def test_missing_corpus_names_the_command(self, tmp_path):
        store = ProjectStore(tmp_path / "s")
        with pytest.raises(StoreError, match="engine ingest"):
            store.load_corpus()

    def test_fingerprint_stable_and_sensitive(self, tmp_path):
        a = ProjectStore(tmp_path / "a")
        a.save_corpus(_docs(), _bps(), LoadReport())
        b = ProjectStore(tmp_path / "b")
        b.save_corpus(_docs(), _bps(), LoadReport())
        assert a.corpus_fingerprint() == b.corpus_fingerprint()
        c = ProjectStore(tmp_path / "c")
        c.save_corpus(_docs()[:1], _bps(), LoadReport())
        assert c.corpus_fingerprint() != a.corpus_fingerprint()


class TestArtifacts:
    def test_classifier_round_trip_keeps_metadata(self, tmp_path):
        store = ProjectStore(tmp_path / "s")
        clf = _fitted_clf()
        store.save_classifier(clf, metadata={"seed": 7, "reg_C": 0.1})
        loaded, meta = store.load_classifier()
        assert meta == {"seed": 7, "reg_C": 0.1}
        assert loaded.classes == clf.classes
        X = np.random.default_rng(1).normal(size=(5, 3))
        from bpcite.classifier import predict_proba_matrix
        np.testing.assert_allclose(
            predict_proba_matrix(loaded, X), predict_proba_matrix(clf, X), atol=1e-12
        )

    def test_missing_artifacts_name_the_command(self, tmp_path):
        store = ProjectStore(tmp_path / "s")
        with pytest.raises(StoreError, match="engine train"):
            store.load_pipeline()
        with pytest.raises(StoreError, match="engine train"):
            store.load_classifier()
        with pytest.raises(StoreError, match="engine train"):
            store.load_metrics()
        with pytest.raises(StoreError, match="engine train"):
            store.load_split()
        with pytest.raises(StoreError, match="engine infer"):
            store.load_citations()

    def test_model_pair_refuses_foreign_classifier(self, tmp_path):
        store = ProjectStore(tmp_path / "s")
        bodies = [
            "tribunal julgou procedente a acao direta",
            "tribunal negou provimento ao recurso extraordinario",
            "julgou improcedente o pedido da acao",
            "recurso provido pelo tribunal em parte",
        ]
        pipeline = fit_pipeline(bodies, k=2, min_df=1)
        store.save_pipeline(pipeline)
        store.save_classifier(_fitted_clf(fingerprint="0" * 16), metadata={})
        with pytest.raises(StoreError, match="retrain"):
            store.load_model_pair()

    def test_model_pair_accepts_matching_fingerprint(self, tmp_path):
        store = ProjectStore(tmp_path / "s")
        bodies = [
            "tribunal julgou procedente a acao direta",
            "tribunal negou provimento ao recurso extraordinario",
            "julgou improcedente o pedido da acao",
            "recurso provido pelo tribunal em parte",
        ]
        pipeline = fit_pipeline(bodies, k=2, min_df=1)
        store.save_pipeline(pipeline)
        store.save_classifier(
            _fitted_clf(fingerprint=pipeline_fingerprint(pipeline)), metadata={"x": 1}
        )
        _, _, meta = store.load_model_pair()
        assert meta == {"x": 1}


class TestCitations:
    def test_round_trip_with_meta(self, tmp_path):
        store = ProjectStore(tmp_path / "s")
        records = [
            CitationRecord("D1", 1, "explicit", 1.0, "2012-03"),
            CitationRecord("D2", 2, "potential", 0.97, None),
        ]
        store.save_citations(records, meta={"t_c": 0.95})
        loaded, meta = store.load_citations()
        assert loaded == records
        assert meta == {"t_c": 0.95}

    def test_rerun_is_byte_identical(self, tmp_path):
        records = [CitationRecord("D1", 1, "explicit", 1.0, "2012-03")]
        a = ProjectStore(tmp_path / "a")
        a.save_citations(records, meta={"t_c": 0.9})
        b = ProjectStore(tmp_path / "b")
        b.save_citations(records, meta={"t_c": 0.9})
        assert a.citations_path.read_bytes() == b.citations_path.read_bytes()
        assert a.inference_meta_path.read_bytes() == b.inference_meta_path.read_bytes()


class TestExplanationCache:
    def test_key_depends_on_config_not_order(self, tmp_path):
        store = ProjectStore(tmp_path / "s")
        k1 = store.explanation_key("D1", 3, LimeConfig())
        k2 = store.explanation_key("D1", 3, LimeConfig())
        assert k1 == k2
        assert store.explanation_key("D1", 3, LimeConfig(seed=1)) != k1
        assert store.explanation_key("D1", 4, LimeConfig()) != k1
        assert store.explanation_key("D2", 3, LimeConfig()) != k1
        assert store.explanation_key("D1", 3, LimeConfig(n_samples=50)) != k1

    def test_save_load(self, tmp_path):
        store = ProjectStore(tmp_path / "s")
        key = store.explanation_key("D1", 3, LimeConfig())
        assert store.load_explanation(key) is None
        store.save_explanation(key, {"doc_id": "D1", "weights": [0.25]})
        assert store.load_explanation(key) == {"doc_id": "D1", "weights": [0.25]}


class TestVersion:
    def test_version_tracks_served_files(self, tmp_path):
        store = ProjectStore(tmp_path / "s")
        v0 = store.store_version()
        store.save_corpus(_docs(), _bps(), LoadReport())
        v1 = store.store_version()
        assert v1 != v0
        store.save_citations([], meta={})
        v2 = store.store_version()
        assert v2 != v1
        assert store.store_version() == v2

    def test_version_identical_for_identical_stores(self, tmp_path):
        a = ProjectStore(tmp_path / "a")
        a.save_corpus(_docs(), _bps(), LoadReport())
        b = ProjectStore(tmp_path / "b")
        b.save_corpus(_docs(), _bps(), LoadReport())
        assert a.store_version() == b.store_version()
