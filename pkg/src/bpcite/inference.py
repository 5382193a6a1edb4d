"""Citation inference: classify documents and emit citation records.

A document's predicted class either confirms one of its labeled explicit
citations (kept as explicit, confidence 1.0) or, when the calibrated
probability clears the configured threshold, yields a potential citation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classifier import CalibratedClassifier, predict_proba
from .corpus import Document
from .embedding import EmbeddingPipeline, embed, pipeline_fingerprint
from .serial import canonical_json

EXPLICIT = "explicit"
POTENTIAL = "potential"


@dataclass(frozen=True)
class CitationRecord:
    doc_id: str
    bp_id: int
    kind: str
    confidence: float
    month: str | None

    def __post_init__(self):
        if self.kind not in (EXPLICIT, POTENTIAL):
            raise ValueError(f"unknown citation kind {self.kind!r}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must be within [0, 1]")


@dataclass(frozen=True)
class InferenceConfig:
    t_c: float
    bp_scope: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if not 0.0 <= self.t_c <= 1.0:
            raise ValueError("t_c must be within [0, 1]")


@dataclass(frozen=True)
class InferenceIssue:
    doc_id: str
    message: str


def month_of(doc: Document) -> str | None:
    if doc.date is None:
        return None
    return f"{doc.date.year:04d}-{doc.date.month:02d}"


class ProbabilityModel:
    """Embeds raw text and exposes per-precedent calibrated probabilities.

    Anything with .classes, .proba(body) and .probability(body, bp_id)
    can stand in for it downstream.
    """

    def __init__(self, pipeline: EmbeddingPipeline, clf: CalibratedClassifier):
        fp = pipeline_fingerprint(pipeline)
        if clf.embedding_fingerprint and clf.embedding_fingerprint != fp:
            raise ValueError(
                "classifier was fitted against a different embedding pipeline "
                f"({clf.embedding_fingerprint} != {fp})"
            )
        self.pipeline = pipeline
        self.clf = clf

    @property
    def classes(self) -> tuple[int, ...]:
        return self.clf.classes

    def proba(self, body: str) -> np.ndarray:
        return predict_proba(self.clf, embed(self.pipeline, body))

    def probability(self, body: str, bp_id: int) -> float:
        return float(self.proba(body)[self.classes.index(bp_id)])


def infer_document(model, doc: Document, cfg: InferenceConfig) -> CitationRecord | None:
    """Explicit record when the argmax class is already labeled, else a
    potential record if its probability reaches t_c (>=, not >)."""
    p = model.proba(doc.body)
    best = int(np.argmax(p))
    bp = model.classes[best]
    if bp in doc.explicit_bps:
        return CitationRecord(doc.doc_id, bp, EXPLICIT, 1.0, month_of(doc))
    if p[best] >= cfg.t_c:
        return CitationRecord(doc.doc_id, bp, POTENTIAL, float(p[best]), month_of(doc))
    return None


def batch_infer(
    model,
    docs: list[Document],
    cfg: InferenceConfig,
) -> tuple[list[CitationRecord], list[InferenceIssue]]:
    """Stateless map over docs in input order; per-document failures are
    collected instead of aborting the batch."""
    scope = cfg.bp_scope or frozenset(model.classes)
    records: list[CitationRecord] = []
    issues: list[InferenceIssue] = []
    for doc in docs:
        outside = doc.explicit_bps - scope
        if outside:
            issues.append(InferenceIssue(
                doc.doc_id,
                f"explicit labels outside scope, skipped: {sorted(outside)}",
            ))
            continue
        try:
            record = infer_document(model, doc, cfg)
        except Exception as exc:  # noqa: BLE001 - one bad document must not sink the batch
            issues.append(InferenceIssue(doc.doc_id, str(exc)))
            continue
        if record is not None:
            records.append(record)
    return records, issues


def write_citation_index(records: list[CitationRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            row = {
                "doc_id": r.doc_id,
                "bp_id": r.bp_id,
                "kind": r.kind,
                "confidence": r.confidence,
                "month": r.month,
            }
            fh.write(canonical_json(row) + "\n")


def read_citation_index(path: str | Path) -> list[CitationRecord]:
    import json

    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            records.append(CitationRecord(
                row["doc_id"], int(row["bp_id"]), row["kind"],
                float(row["confidence"]), row["month"],
            ))
    return records
