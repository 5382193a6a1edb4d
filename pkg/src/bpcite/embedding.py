"""Truncated TF-IDF document embedding.

Three fitted stages: TF-IDF over a min_df-filtered vocabulary, a rank-k
SVD projection (k defaults to 50), and per-coordinate standardization.
All stages are deterministic for a fixed seed and persist to a single
JSON artifact that round-trips exactly.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .citations import DEFAULT_CITATION_PATTERNS, strip_explicit_citations
from .serial import canonical_json, read_json, write_json
from .textproc import NormalizerConfig, TokenSeq, normalize

FORMAT_TAG = "bpcite-pipeline/1"

# largest problem size still solved by exact dense decomposition
_DENSE_LIMIT = 64


@dataclass(frozen=True)
class TfIdfModel:
    vocabulary: dict[str, int]
    idf: np.ndarray
    doc_count: int


@dataclass(frozen=True)
class SvdModel:
    components: np.ndarray
    singular_values: np.ndarray

    @property
    def k(self) -> int:
        return self.components.shape[0]


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    stdev: np.ndarray


@dataclass(frozen=True)
class EmbeddingPipeline:
    tfidf: TfIdfModel
    svd: SvdModel
    standardizer: Standardizer
    normalizer: NormalizerConfig
    citation_patterns: tuple[str, ...] = DEFAULT_CITATION_PATTERNS


def fit_tfidf(token_seqs: list[TokenSeq], min_df: int = 2) -> TfIdfModel:
    """Build the vocabulary (document frequency >= min_df) and idf weights.

    idf(t) = ln((1 + N) / (1 + df(t))) + 1, finite and positive for every
    retained term.
    """
    if not token_seqs:
        raise ValueError("cannot fit tf-idf on an empty document list")
    df: dict[str, int] = {}
    for seq in token_seqs:
        for term in set(seq):
            df[term] = df.get(term, 0) + 1
    terms = sorted(t for t, n in df.items() if n >= min_df)
    if not terms:
        raise ValueError(f"vocabulary is empty at min_df={min_df}")
    n = len(token_seqs)
    idf = np.array([math.log((1 + n) / (1 + df[t])) + 1.0 for t in terms])
    return TfIdfModel({t: i for i, t in enumerate(terms)}, idf, n)


def transform_tfidf(model: TfIdfModel, token_seq: TokenSeq) -> sp.csr_matrix:
    """Counts times idf, L2-normalized; a 1 x |V| sparse row.

    Out-of-vocabulary terms are ignored; a document with no in-vocabulary
    term maps to the zero vector.
    """
    counts: dict[int, int] = {}
    for term in token_seq:
        col = model.vocabulary.get(term)
        if col is not None:
            counts[col] = counts.get(col, 0) + 1
    size = len(model.vocabulary)
    if not counts:
        return sp.csr_matrix((1, size))
    cols = sorted(counts)
    values = np.array([counts[c] * model.idf[c] for c in cols])
    values /= np.linalg.norm(values)
    return sp.csr_matrix((values, ([0] * len(cols), cols)), shape=(1, size))


def transform_tfidf_matrix(model: TfIdfModel, token_seqs: list[TokenSeq]) -> sp.csr_matrix:
    if not token_seqs:
        return sp.csr_matrix((0, len(model.vocabulary)))
    return sp.vstack([transform_tfidf(model, seq) for seq in token_seqs], format="csr")


def _fix_signs(components: np.ndarray) -> np.ndarray:
    out = components.copy()
    for row in out:
        lead = np.argmax(np.abs(row))
        if row[lead] < 0:
            row *= -1.0
    return out


def fit_svd(matrix, k: int = 50, seed: int = 0) -> SvdModel:
    """Top-k right singular vectors/values of the (uncentered) matrix.

    Small problems use the exact dense decomposition; larger ones use
    randomized subspace iteration (2 power steps, oversampling 10) seeded
    for bit-stable output. When k exceeds the matrix rank the surplus
    components are kept with singular values ~ 0.
    """
    n, width = matrix.shape
    if not 1 <= k <= min(n, width):
        raise ValueError(f"k={k} out of range for a {n}x{width} matrix")
    if min(n, width) <= _DENSE_LIMIT:
        dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix, dtype=float)
        _, s, vt = np.linalg.svd(dense, full_matrices=False)
        return SvdModel(_fix_signs(vt[:k]), s[:k].copy())

    rng = np.random.default_rng(seed)
    p = min(k + 10, min(n, width))
    omega = rng.standard_normal((width, p))
    q, _ = np.linalg.qr(matrix @ omega)
    for _ in range(2):
        z, _ = np.linalg.qr(matrix.T @ q)
        q, _ = np.linalg.qr(matrix @ z)
    b = np.asarray(q.T @ matrix)
    _, s, vt = np.linalg.svd(b, full_matrices=False)
    return SvdModel(_fix_signs(vt[:k]), s[:k].copy())


def project(svd: SvdModel, vector) -> np.ndarray:
    """components @ vector, as a dense k-vector."""
    width = svd.components.shape[1]
    if sp.issparse(vector):
        if vector.shape != (1, width):
            raise ValueError(f"expected a 1x{width} vector, got {vector.shape}")
        return np.asarray(vector @ svd.components.T).ravel()
    arr = np.asarray(vector, dtype=float).ravel()
    if arr.shape != (width,):
        raise ValueError(f"expected a length-{width} vector, got {arr.shape}")
    return svd.components @ arr


def fit_standardizer(rows) -> Standardizer:
    """Per-coordinate mean/stdev (population). Constant coordinates get
    stdev 1 so they pass through centered only."""
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 2:
        raise ValueError("standardizer needs at least 2 rows")
    mean = arr.mean(axis=0)
    stdev = arr.std(axis=0)
    stdev[stdev == 0.0] = 1.0
    return Standardizer(mean, stdev)


def standardize(std: Standardizer, vector: np.ndarray) -> np.ndarray:
    return (np.asarray(vector, dtype=float) - std.mean) / std.stdev


def fit_pipeline(
    bodies: list[str],
    k: int = 50,
    min_df: int = 2,
    seed: int = 0,
    normalizer: NormalizerConfig = NormalizerConfig(),
    citation_patterns: tuple[str, ...] = DEFAULT_CITATION_PATTERNS,
) -> EmbeddingPipeline:
    """Fit all three stages on raw bodies (explicit citations stripped)."""
    seqs = [
        normalize(strip_explicit_citations(body, citation_patterns), normalizer)
        for body in bodies
    ]
    tfidf = fit_tfidf(seqs, min_df=min_df)
    matrix = transform_tfidf_matrix(tfidf, seqs)
    svd = fit_svd(matrix, k=min(k, min(matrix.shape)), seed=seed)
    projected = np.asarray(matrix @ svd.components.T)
    standardizer = fit_standardizer(projected)
    return EmbeddingPipeline(tfidf, svd, standardizer, normalizer, citation_patterns)


def embed(pipeline: EmbeddingPipeline, body: str) -> np.ndarray:
    """Dense k-vector for one raw document body."""
    stripped = strip_explicit_citations(body, pipeline.citation_patterns)
    vec = transform_tfidf(pipeline.tfidf, normalize(stripped, pipeline.normalizer))
    return standardize(pipeline.standardizer, project(pipeline.svd, vec))


def project_raw(pipeline: EmbeddingPipeline, body: str) -> np.ndarray:
    """SVD projection without standardization (similarity analytics)."""
    stripped = strip_explicit_citations(body, pipeline.citation_patterns)
    vec = transform_tfidf(pipeline.tfidf, normalize(stripped, pipeline.normalizer))
    return project(pipeline.svd, vec)


# ---------------------------------------------------------------------------
# Persistence


def pipeline_to_dict(pipeline: EmbeddingPipeline) -> dict:
    terms = sorted(pipeline.tfidf.vocabulary, key=pipeline.tfidf.vocabulary.get)
    cfg = pipeline.normalizer
    return {
        "format": FORMAT_TAG,
        "normalizer_fingerprint": cfg.fingerprint(),
        "normalizer": {
            "stopwords": cfg.stopwords,
            "stemmer": cfg.stemmer,
            "lemma_table": [list(pair) for pair in cfg.lemma_table],
        },
        "citation_patterns": list(pipeline.citation_patterns),
        "vocabulary": terms,
        "idf": pipeline.tfidf.idf.tolist(),
        "doc_count": pipeline.tfidf.doc_count,
        "k": pipeline.svd.k,
        "components": pipeline.svd.components.ravel().tolist(),
        "singular_values": pipeline.svd.singular_values.tolist(),
        "mean": pipeline.standardizer.mean.tolist(),
        "stdev": pipeline.standardizer.stdev.tolist(),
    }


def pipeline_from_dict(data: dict) -> EmbeddingPipeline:
    if data.get("format") != FORMAT_TAG:
        raise ValueError(f"unsupported pipeline artifact: {data.get('format')!r}")
    terms = data["vocabulary"]
    tfidf = TfIdfModel(
        {t: i for i, t in enumerate(terms)},
        np.array(data["idf"], dtype=float),
        int(data["doc_count"]),
    )
    k = int(data["k"])
    svd = SvdModel(
        np.array(data["components"], dtype=float).reshape(k, len(terms)),
        np.array(data["singular_values"], dtype=float),
    )
    standardizer = Standardizer(
        np.array(data["mean"], dtype=float), np.array(data["stdev"], dtype=float)
    )
    cfg = NormalizerConfig(
        stopwords=data["normalizer"]["stopwords"],
        stemmer=data["normalizer"]["stemmer"],
        lemma_table=tuple(tuple(pair) for pair in data["normalizer"]["lemma_table"]),
    )
    if cfg.fingerprint() != data["normalizer_fingerprint"]:
        raise ValueError("pipeline artifact normalizer fingerprint mismatch")
    return EmbeddingPipeline(tfidf, svd, standardizer, cfg, tuple(data["citation_patterns"]))


def pipeline_fingerprint(pipeline: EmbeddingPipeline) -> str:
    """Short digest over the whole fitted artifact, for cross-checking."""
    blob = canonical_json(pipeline_to_dict(pipeline)).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


def save_pipeline(pipeline: EmbeddingPipeline, path: str | Path) -> None:
    write_json(path, pipeline_to_dict(pipeline))


def load_pipeline(path: str | Path) -> EmbeddingPipeline:
    return pipeline_from_dict(read_json(path))
