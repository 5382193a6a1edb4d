"""On-disk project store: corpus, fitted artifacts, citation index, caches.

Every file is canonical JSON (or JSONL of canonical rows), so identical
inputs and seeds reproduce identical bytes. Artifacts cross-reference
each other by fingerprint and loading refuses mismatched pairs.
"""

from __future__ import annotations

import hashlib
import os
from contextlib import contextmanager
from pathlib import Path

from .classifier import CalibratedClassifier, classifier_from_dict, classifier_to_dict
from .corpus import BindingPrecedent, Document, LoadReport, load_corpus
from .embedding import (
    EmbeddingPipeline,
    load_pipeline,
    pipeline_fingerprint,
    save_pipeline,
)
from .explain import LimeConfig
from .inference import CitationRecord, read_citation_index, write_citation_index
from .serial import canonical_json, read_json, write_json


class StoreError(RuntimeError):
    pass


def document_to_row(doc: Document) -> dict:
    return {
        "id": doc.doc_id,
        "title": doc.title,
        "body": doc.body,
        "date": doc.date.isoformat() if doc.date else None,
        "rapporteur": doc.rapporteur,
        "doc_type": doc.doc_type,
        "explicit_bps": sorted(doc.explicit_bps),
    }


def precedent_to_row(bp: BindingPrecedent) -> dict:
    return {
        "id": bp.bp_id,
        "statement": bp.statement,
        "published": bp.published.isoformat() if bp.published else None,
    }


class ProjectStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)

    # -- layout ------------------------------------------------------------

    @property
    def corpus_dir(self) -> Path:
        return self.root / "corpus"

    @property
    def documents_path(self) -> Path:
        return self.corpus_dir / "documents.jsonl"

    @property
    def precedents_path(self) -> Path:
        return self.corpus_dir / "precedents.jsonl"

    @property
    def load_report_path(self) -> Path:
        return self.corpus_dir / "load_report.json"

    @property
    def pipeline_path(self) -> Path:
        return self.root / "artifacts" / "pipeline.json"

    @property
    def classifier_path(self) -> Path:
        return self.root / "artifacts" / "classifier.json"

    @property
    def metrics_path(self) -> Path:
        return self.root / "artifacts" / "metrics.json"

    @property
    def split_path(self) -> Path:
        return self.root / "artifacts" / "split.json"

    @property
    def citations_path(self) -> Path:
        return self.root / "index" / "citations.jsonl"

    @property
    def inference_meta_path(self) -> Path:
        return self.root / "index" / "inference.json"

    @property
    def explanations_dir(self) -> Path:
        return self.root / "cache" / "explanations"

    def ensure_layout(self) -> None:
        for sub in ("corpus", "artifacts", "index", "cache/explanations"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)

    # -- locking -----------------------------------------------------------

    @property
    def lock_path(self) -> Path:
        return self.root / ".lock"

    @contextmanager
    def lock(self):
        self.root.mkdir(parents=True, exist_ok=True)
        try:
            fd = os.open(self.lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise StoreError(
                f"store {self.root} is locked by another command; "
                f"remove {self.lock_path} if that command crashed"
            ) from None
        try:
            os.write(fd, str(os.getpid()).encode("ascii"))
            os.close(fd)
            yield self
        finally:
            try:
                os.unlink(self.lock_path)
            except FileNotFoundError:
                pass

    # -- corpus ------------------------------------------------------------

    def save_corpus(
        self,
        documents: list[Document],
        precedents: list[BindingPrecedent],
        report: LoadReport,
    ) -> None:
        self.ensure_layout()
        with open(self.documents_path, "w", encoding="utf-8") as fh:
            for doc in documents:
                fh.write(canonical_json(document_to_row(doc)) + "\n")
        with open(self.precedents_path, "w", encoding="utf-8") as fh:
            for bp in precedents:
                fh.write(canonical_json(precedent_to_row(bp)) + "\n")
        write_json(self.load_report_path, {
            "documents_loaded": report.documents_loaded,
            "precedents_loaded": report.precedents_loaded,
            "issues": [
                {"source": i.source, "line": i.line, "message": i.message}
                for i in report.issues
            ],
        })

    def load_corpus(self) -> tuple[list[Document], list[BindingPrecedent], LoadReport]:
        if not self.documents_path.exists():
            raise StoreError(
                f"no corpus in {self.root}; run `engine ingest` first"
            )
        return load_corpus(self.corpus_dir)

    def corpus_fingerprint(self) -> str:
        digest = hashlib.sha256()
        for path in (self.documents_path, self.precedents_path):
            digest.update(path.read_bytes())
        return digest.hexdigest()[:16]

    # -- artifacts ---------------------------------------------------------

    def save_pipeline(self, pipeline: EmbeddingPipeline) -> None:
        self.ensure_layout()
        save_pipeline(pipeline, self.pipeline_path)

    def load_pipeline(self) -> EmbeddingPipeline:
        if not self.pipeline_path.exists():
            raise StoreError(
                f"no pipeline artifact in {self.root}; run `engine train` first"
            )
        return load_pipeline(self.pipeline_path)

    def save_classifier(self, clf: CalibratedClassifier, metadata: dict) -> None:
        self.ensure_layout()
        write_json(self.classifier_path, classifier_to_dict(clf, metadata=metadata))

    def load_classifier(self) -> tuple[CalibratedClassifier, dict]:
        if not self.classifier_path.exists():
            raise StoreError(
                f"no classifier artifact in {self.root}; run `engine train` first"
            )
        data = read_json(self.classifier_path)
        return classifier_from_dict(data), data.get("metadata") or {}

    def load_model_pair(self) -> tuple[EmbeddingPipeline, CalibratedClassifier, dict]:
        """Pipeline and classifier, refusing mixed fingerprints."""
        pipeline = self.load_pipeline()
        clf, metadata = self.load_classifier()
        fp = pipeline_fingerprint(pipeline)
        if clf.embedding_fingerprint and clf.embedding_fingerprint != fp:
            raise StoreError(
                "classifier artifact does not match the pipeline artifact "
                f"({clf.embedding_fingerprint} != {fp}); retrain"
            )
        return pipeline, clf, metadata

    def save_metrics(self, metrics: dict) -> None:
        self.ensure_layout()
        write_json(self.metrics_path, metrics)

    def load_metrics(self) -> dict:
        if not self.metrics_path.exists():
            raise StoreError(f"no metrics in {self.root}; run `engine train` first")
        return read_json(self.metrics_path)

    def save_split(self, split_info: dict) -> None:
        self.ensure_layout()
        write_json(self.split_path, split_info)

    def load_split(self) -> dict:
        if not self.split_path.exists():
            raise StoreError(f"no split record in {self.root}; run `engine train` first")
        return read_json(self.split_path)

    # -- citation index ------------------------------------------------------

    def save_citations(self, records: list[CitationRecord], meta: dict) -> None:
        self.ensure_layout()
        write_citation_index(records, self.citations_path)
        write_json(self.inference_meta_path, meta)

    def load_citations(self) -> tuple[list[CitationRecord], dict]:
        if not self.citations_path.exists():
            raise StoreError(
                f"no citation index in {self.root}; run `engine infer` first"
            )
        return read_citation_index(self.citations_path), read_json(self.inference_meta_path)

    # -- explanation cache ---------------------------------------------------

    def explanation_key(self, doc_id: str, bp_id: int, cfg: LimeConfig) -> str:
        blob = canonical_json({
            "doc_id": doc_id,
            "bp_id": bp_id,
            "n_samples": cfg.n_samples,
            "ridge_lambda": cfg.ridge_lambda,
            "kernel_width": cfg.kernel_width,
            "seed": cfg.seed,
        })
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:24]

    def explanation_path(self, key: str) -> Path:
        return self.explanations_dir / f"{key}.json"

    def load_explanation(self, key: str) -> dict | None:
        path = self.explanation_path(key)
        if not path.exists():
            return None
        return read_json(path)

    def save_explanation(self, key: str, data: dict) -> None:
        self.ensure_layout()
        write_json(self.explanation_path(key), data)

    # -- versioning ----------------------------------------------------------

    def store_version(self) -> str:
        """Digest over everything the API serves from."""
        digest = hashlib.sha256()
        for path in (
            self.documents_path, self.precedents_path, self.pipeline_path,
            self.classifier_path, self.citations_path, self.inference_meta_path,
        ):
            digest.update(path.name.encode("utf-8"))
            digest.update(path.read_bytes() if path.exists() else b"-")
        return digest.hexdigest()[:16]
