"""Tests for citation inference and the citation index."""

import datetime

import numpy as np
import pytest

from bpcite.classifier import fit_calibrated
from bpcite.corpus import Document
from bpcite.embedding import fit_pipeline, embed, pipeline_fingerprint
from bpcite.inference import (
    EXPLICIT,
    POTENTIAL,
    CitationRecord,
    InferenceConfig,
    ProbabilityModel,
    batch_infer,
    infer_document,
    month_of,
    read_citation_index,
    write_citation_index,
)


def _doc(doc_id, body="Texto base.", explicit=(), date=None, **kw):
    return Document(
        doc_id=doc_id,
        title=kw.get("title", doc_id),
        body=body,
        date=date,
        rapporteur=kw.get("rapporteur", "min. alves"),
        doc_type=kw.get("doc_type", "Rcl"),
        explicit_bps=frozenset(explicit),
    )


class _StubModel:
    """Fixed probability vector per body string."""

    def __init__(self, table, classes=(1, 2, 3)):
        self.table = table
        self.classes = tuple(classes)

    def proba(self, body):
        value = self.table[body]
        if isinstance(value, Exception):
            raise value
        return np.asarray(value)

    def probability(self, body, bp_id):
        return float(self.proba(body)[self.classes.index(bp_id)])


class TestTypes:
    def test_kind_validated(self):
        with pytest.raises(ValueError, match="kind"):
            CitationRecord("d", 1, "implicit", 0.5, None)

    def test_confidence_range(self):
        with pytest.raises(ValueError, match="confidence"):
            CitationRecord("d", 1, POTENTIAL, 1.5, None)

    def test_tc_range(self):
        with pytest.raises(ValueError, match="t_c"):
            InferenceConfig(t_c=-0.1)
        with pytest.raises(ValueError, match="t_c"):
            InferenceConfig(t_c=1.0000001)
        InferenceConfig(t_c=0.0)
        InferenceConfig(t_c=1.0)

    def test_month_of(self):
        assert month_of(_doc("d", date=datetime.date(2015, 3, 20))) == "2015-03"
        assert month_of(_doc("d")) is None


class TestInferDocument:
    def test_potential_above_threshold(self):
        model = _StubModel({"b": [0.96, 0.03, 0.01]})
        record = infer_document(model, _doc("d1", body="b"), InferenceConfig(0.95))
        assert record == CitationRecord("d1", 1, POTENTIAL, 0.96, None)

    def test_exact_threshold_emits(self):
        model = _StubModel({"b": [0.9, 0.06, 0.04]})
        record = infer_document(model, _doc("d1", body="b"), InferenceConfig(0.9))
        assert record is not None and record.kind == POTENTIAL

    def test_below_threshold_none(self):
        model = _StubModel({"b": [0.89, 0.07, 0.04]})
        assert infer_document(model, _doc("d1", body="b"), InferenceConfig(0.9)) is None

    def test_explicit_wins_regardless_of_threshold(self):
        model = _StubModel({"b": [0.5, 0.3, 0.2]})
        record = infer_document(
            model, _doc("d1", body="b", explicit=[1]), InferenceConfig(0.999)
        )
        assert record == CitationRecord("d1", 1, EXPLICIT, 1.0, None)

    def test_argmax_not_in_explicit_set_stays_potential(self):
        # labeled with bp 2, but the model prefers bp 1
        model = _StubModel({"b": [0.97, 0.02, 0.01]})
        record = infer_document(
            model, _doc("d1", body="b", explicit=[2]), InferenceConfig(0.9)
        )
        assert record.kind == POTENTIAL and record.bp_id == 1

    def test_month_carried(self):
        model = _StubModel({"b": [0.99, 0.005, 0.005]})
        record = infer_document(
            model, _doc("d1", body="b", date=datetime.date(2012, 11, 2)),
            InferenceConfig(0.9),
        )
        assert record.month == "2012-11"


def _random_model_and_docs(seed, n_docs=200):
    rng = np.random.default_rng(seed)
    table = {}
    docs = []
    for i in range(n_docs):
        body = f"corpo {i}"
        p = rng.dirichlet(np.ones(3) * 0.4)
        table[body] = p
        explicit = [int(rng.integers(1, 4))] if rng.random() < 0.2 else []
        docs.append(_doc(f"d{i:03d}", body=body, explicit=explicit))
    return _StubModel(table), docs


class TestBatchInfer:
    def test_matches_per_document_calls(self):
        model, docs = _random_model_and_docs(3)
        cfg = InferenceConfig(0.6)
        records, issues = batch_infer(model, docs, cfg)
        assert issues == []
        singles = [r for d in docs if (r := infer_document(model, d, cfg))]
        assert records == singles

    def test_threshold_nesting(self):
        model, docs = _random_model_and_docs(7)
        keys = {}
        for tc in (0.90, 0.95, 0.99):
            records, _ = batch_infer(model, docs, InferenceConfig(tc))
            keys[tc] = {(r.doc_id, r.bp_id) for r in records if r.kind == POTENTIAL}
        assert keys[0.99] <= keys[0.95] <= keys[0.90]

    def test_explicit_records_independent_of_threshold(self):
        model, docs = _random_model_and_docs(11)
        per_tc = []
        for tc in (0.0, 0.5, 1.0):
            records, _ = batch_infer(model, docs, InferenceConfig(tc))
            per_tc.append([r for r in records if r.kind == EXPLICIT])
        assert per_tc[0] == per_tc[1] == per_tc[2]

    def test_zero_threshold_covers_every_unlabeled_doc(self):
        model, docs = _random_model_and_docs(13)
        records, _ = batch_infer(model, docs, InferenceConfig(0.0))
        with_record = {r.doc_id for r in records}
        for doc in docs:
            assert doc.doc_id in with_record

    def test_out_of_scope_label_skipped_with_diagnostic(self):
        model = _StubModel({"b": [0.9, 0.05, 0.05]})
        docs = [_doc("d1", body="b", explicit=[9]), _doc("d2", body="b")]
        records, issues = batch_infer(model, docs, InferenceConfig(0.5))
        assert [r.doc_id for r in records] == ["d2"]
        assert issues[0].doc_id == "d1" and "scope" in issues[0].message

    def test_per_document_errors_collected(self):
        model = _StubModel({
            "ok": [0.9, 0.05, 0.05],
            "boom": RuntimeError("embedding exploded"),
        })
        docs = [_doc("d1", body="ok"), _doc("d2", body="boom"), _doc("d3", body="ok")]
        records, issues = batch_infer(model, docs, InferenceConfig(0.5))
        assert [r.doc_id for r in records] == ["d1", "d3"]
        assert issues == [type(issues[0])("d2", "embedding exploded")]


BODIES = {
    1: "Curso de gol e lemure no processo. Trata da materia de gols.",
    2: "Navegacao fluvial e portos. Regras de navegacao no rio.",
}


def _tiny_training_set():
    bodies, labels = [], []
    rng = np.random.default_rng(0)
    for bp, base in BODIES.items():
        for i in range(8):
            extra = " ".join(base.split()[: 3 + int(rng.integers(0, 4))])
            bodies.append(base + " " + extra)
            labels.append(bp)
    return bodies, labels


class TestProbabilityModel:
    def test_fingerprint_checked(self):
        bodies, labels = _tiny_training_set()
        pipeline = fit_pipeline(bodies, k=4, min_df=1, seed=0)
        X = np.vstack([embed(pipeline, b) for b in bodies])
        clf = fit_calibrated(
            X, labels, reg_C=1.0, seed=0,
            embedding_fingerprint=pipeline_fingerprint(pipeline),
        )
        model = ProbabilityModel(pipeline, clf)
        assert model.classes == (1, 2)
        other = fit_pipeline(bodies[:8], k=3, min_df=1, seed=1)
        with pytest.raises(ValueError, match="different embedding pipeline"):
            ProbabilityModel(other, clf)

    def test_probability_matches_proba_entry(self):
        bodies, labels = _tiny_training_set()
        pipeline = fit_pipeline(bodies, k=4, min_df=1, seed=0)
        X = np.vstack([embed(pipeline, b) for b in bodies])
        clf = fit_calibrated(X, labels, reg_C=1.0, seed=0)
        model = ProbabilityModel(pipeline, clf)
        p = model.proba(bodies[0])
        assert model.probability(bodies[0], 2) == p[1]
        assert abs(p.sum() - 1.0) <= 1e-9


class TestIndexRoundTrip:
    def test_write_read_and_determinism(self, tmp_path):
        records = [
            CitationRecord("d1", 4, EXPLICIT, 1.0, "2014-05"),
            CitationRecord("d2", 4, POTENTIAL, 0.9725, None),
            CitationRecord("d3", 7, POTENTIAL, 0.95, "2016-01"),
        ]
        p1, p2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        write_citation_index(records, p1)
        write_citation_index(records, p2)
        assert p1.read_bytes() == p2.read_bytes()
        assert read_citation_index(p1) == records
