"""Similarity, ordering, topic clustering, and timeline aggregation.

Everything here is pure computation over fitted artifacts and citation
records; the service layer only reshapes these results into payloads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .corpus import BindingPrecedent, Document
from .embedding import EmbeddingPipeline, project_raw
from .inference import EXPLICIT, POTENTIAL, CitationRecord
from .textproc import segment


@dataclass(frozen=True)
class ParagraphSimilarity:
    doc_id: str
    paragraph_index: int
    similarity: float
    paragraph_length: int


@dataclass(frozen=True)
class TopicModel:
    W: np.ndarray
    H: np.ndarray
    k: int
    iterations: int
    seed: int
    objective_trace: tuple[float, ...]


@dataclass(frozen=True)
class TimelineBin:
    bp_id: int
    month: str
    total: int
    explicit: int
    potential: int

    def __post_init__(self):
        if self.total != self.explicit + self.potential:
            raise ValueError("total must equal explicit + potential")


def angular_similarity(u, v) -> float:
    """1 - angle/pi, in [0,1]; zero vectors share no signal, so 0.

    The angle comes from 2*atan2(|u^-v^|, |u^+v^|) over the unit vectors,
    which stays accurate where acos of a rounded cosine loses half its
    digits (nearly parallel or opposite inputs).
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    uh = u / nu
    vh = v / nv
    theta = 2.0 * math.atan2(
        float(np.linalg.norm(uh - vh)), float(np.linalg.norm(uh + vh))
    )
    return 1.0 - theta / math.pi


def paragraph_similarities(
    pipeline: EmbeddingPipeline, doc: Document, bp: BindingPrecedent
) -> list[ParagraphSimilarity]:
    """Unstandardized projections keep angles meaningful."""
    bp_vec = project_raw(pipeline, bp.statement)
    out = []
    for index, (start, end) in enumerate(segment(doc.body).paragraph_spans):
        vec = project_raw(pipeline, doc.body[start:end])
        out.append(ParagraphSimilarity(
            doc.doc_id, index, angular_similarity(vec, bp_vec), end - start
        ))
    return out


def document_score(similarities) -> float:
    values = [
        s.similarity if isinstance(s, ParagraphSimilarity) else float(s)
        for s in similarities
    ]
    if not values:
        raise ValueError("need at least one paragraph similarity")
    return max(values)


def order_documents(scored: list[tuple[str, float]]) -> list[tuple[str, float]]:
    """Descending score; ties broken by doc_id ascending."""
    return sorted(scored, key=lambda pair: (-pair[1], pair[0]))


def fit_nmf(X, k: int, iters: int = 200, seed: int = 0) -> TopicModel:
    """Multiplicative updates for the squared Frobenius objective."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be a matrix")
    if (X < 0).any():
        raise ValueError("X must be non-negative")
    if not 1 <= k <= min(X.shape):
        raise ValueError(f"k must be in [1, {min(X.shape)}]")
    eps = 1e-12
    rng = np.random.default_rng(seed)
    scale = math.sqrt(max(X.mean(), eps) / k)
    W = scale * rng.random((X.shape[0], k))
    H = scale * rng.random((k, X.shape[1]))
    trace = []
    for _ in range(iters):
        W *= (X @ H.T) / (W @ (H @ H.T) + eps)
        H *= (W.T @ X) / ((W.T @ W) @ H + eps)
        diff = X - W @ H
        trace.append(float(np.sum(diff * diff)))
    return TopicModel(W, H, k, iters, seed, tuple(trace))


def topic_keywords(model: TopicModel, vocab: list[str], m: int = 10) -> list[list[tuple[str, float]]]:
    """Top-m terms per topic by H weight; ties resolved lexicographically."""
    if len(vocab) != model.H.shape[1]:
        raise ValueError("vocab length must match H columns")
    result = []
    for row in model.H:
        ranked = sorted(zip(vocab, row), key=lambda tw: (-tw[1], tw[0]))
        result.append([(term, float(weight)) for term, weight in ranked[:m]])
    return result


def assign_topics(model: TopicModel) -> np.ndarray:
    return np.argmax(model.W, axis=1)


_FILTER_FIELDS = {"kinds", "rapporteur", "doc_type", "t_c"}


def timeline_bins(
    records: list[CitationRecord],
    docs: dict[str, Document],
    filters: dict | None = None,
) -> list[TimelineBin]:
    """Monthly counts per precedent after filtering; undated records and
    empty months are simply absent."""
    filters = dict(filters or {})
    unknown = set(filters) - _FILTER_FIELDS
    if unknown:
        raise ValueError(f"unknown filter fields: {sorted(unknown)}")
    kinds = set(filters.get("kinds") or (EXPLICIT, POTENTIAL))
    bad_kinds = kinds - {EXPLICIT, POTENTIAL}
    if bad_kinds:
        raise ValueError(f"unknown citation kinds: {sorted(bad_kinds)}")
    rapporteur = filters.get("rapporteur")
    doc_type = filters.get("doc_type")
    t_c = filters.get("t_c")
    if t_c is not None and not 0.0 <= float(t_c) <= 1.0:
        raise ValueError("t_c must be within [0, 1]")

    counts: dict[tuple[int, str], list[int]] = {}
    for record in records:
        if record.month is None or record.kind not in kinds:
            continue
        if record.kind == POTENTIAL and t_c is not None and record.confidence < float(t_c):
            continue
        doc = docs.get(record.doc_id)
        if doc is None:
            raise ValueError(f"record references unknown document {record.doc_id}")
        if rapporteur is not None and doc.rapporteur != rapporteur:
            continue
        if doc_type is not None and doc.doc_type != doc_type:
            continue
        pair = counts.setdefault((record.bp_id, record.month), [0, 0])
        pair[0 if record.kind == EXPLICIT else 1] += 1
    return [
        TimelineBin(bp_id, month, explicit + potential, explicit, potential)
        for (bp_id, month), (explicit, potential) in sorted(counts.items())
    ]


def similarity_histogram(scores, n_bins: int = 10) -> list[int]:
    """Equal-width bins over [0,1]; only the last bin includes its right edge."""
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    counts = [0] * n_bins
    for s in scores:
        s = float(s)
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"score {s} outside [0, 1]")
        counts[min(int(s * n_bins), n_bins - 1)] += 1
    return counts
