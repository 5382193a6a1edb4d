"""Sentence-level local explanations of a classifier decision.

Perturb a document by removing random sentence subsets, score each
variant, then fit a locality-weighted ridge regression from masks to
probabilities. Coefficients rank sentences by their pull on the class.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .corpus import Document
from .textproc import segment


@dataclass(frozen=True)
class PerturbationSample:
    mask: tuple[int, ...]
    prob: float
    weight: float


@dataclass(frozen=True)
class LimeConfig:
    n_samples: int = 1000
    ridge_lambda: float = 1.0
    kernel_width: float | None = None  # None: 0.25 * sqrt(sentence count)
    seed: int = 0

    def __post_init__(self):
        if self.ridge_lambda < 0:
            raise ValueError("ridge_lambda must be >= 0")
        if self.n_samples < 2:
            raise ValueError("n_samples must be at least 2")


@dataclass(frozen=True)
class Explanation:
    doc_id: str
    bp_id: int
    sentence_weights: tuple[float, ...]
    intercept: float
    fidelity_r2: float
    n_samples: int
    seed: int
    degenerate: bool = False


def task_seed(seed: int, doc_id: str, bp_id: int) -> int:
    """Stable per-(document, precedent) stream so batches can run in any order."""
    digest = hashlib.sha256(f"{seed}:{doc_id}:{bp_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def sample_masks(n_sentences: int, cfg: LimeConfig) -> list[np.ndarray]:
    """First mask keeps everything; the rest drop a uniform-size random
    subset, never the whole document."""
    if n_sentences < 1:
        raise ValueError("need at least one sentence")
    full = np.ones(n_sentences, dtype=np.int_)
    if n_sentences == 1:
        return [full]
    rng = np.random.default_rng(cfg.seed)
    masks = [full]
    for _ in range(cfg.n_samples - 1):
        n_removed = int(rng.integers(1, n_sentences))
        dropped = rng.choice(n_sentences, size=n_removed, replace=False)
        mask = np.ones(n_sentences, dtype=np.int_)
        mask[dropped] = 0
        masks.append(mask)
    return masks


def masked_text(body: str, sentence_spans, mask) -> str:
    """Original bytes minus dropped sentence spans; gaps and paragraph
    breaks survive untouched."""
    parts = []
    prev = 0
    for keep, (start, end) in zip(mask, sentence_spans):
        parts.append(body[prev:start])
        if keep:
            parts.append(body[start:end])
        prev = end
    parts.append(body[prev:])
    return "".join(parts)


def evaluate_masked(model, doc: Document, mask, bp_id: int) -> float:
    """model duck-types probability(text, bp_id) -> float."""
    mask = np.asarray(mask)
    if not mask.any():
        raise ValueError("mask removes every sentence")
    spans = segment(doc.body).sentence_spans
    if len(mask) != len(spans):
        raise ValueError(f"mask length {len(mask)} != sentence count {len(spans)}")
    return float(model.probability(masked_text(doc.body, spans, mask), bp_id))


def kernel_weight(mask, cfg: LimeConfig) -> float:
    mask = np.asarray(mask, dtype=float)
    width = cfg.kernel_width
    if width is None:
        width = 0.25 * math.sqrt(len(mask))
    removed_fraction = 1.0 - mask.mean()
    return math.exp(-(removed_fraction ** 2) / (width ** 2))


def fit_surrogate(samples: list[PerturbationSample], cfg: LimeConfig) -> tuple[np.ndarray, float, float]:
    """Weighted ridge via the normal equations; the intercept column is
    left unpenalized."""
    Z = np.array([s.mask for s in samples], dtype=float)
    y = np.array([s.prob for s in samples])
    w = np.array([s.weight for s in samples])
    n, dim = Z.shape
    if n < dim + 1:
        raise ValueError(f"need at least {dim + 1} samples, got {n}")
    A = np.hstack([Z, np.ones((n, 1))])
    M = (A * w[:, None]).T @ A
    M[np.arange(dim), np.arange(dim)] += cfg.ridge_lambda
    rhs = (A * w[:, None]).T @ y
    try:
        beta = cho_solve(cho_factor(M), rhs)
    except LinAlgError as exc:
        if cfg.ridge_lambda == 0:
            raise ValueError(
                "singular surrogate system; set ridge_lambda > 0"
            ) from exc
        raise
    coefs, intercept = beta[:dim], float(beta[dim])
    residual = y - A @ beta
    sse = float(w @ (residual ** 2))
    mean = float(w @ y) / float(w.sum())
    var = float(w @ ((y - mean) ** 2))
    # constant targets leave only rounding noise in var; that is a perfect fit
    if var <= 1e-15 * max(float(w @ (y ** 2)), 1e-300):
        fidelity_r2 = 1.0
    else:
        fidelity_r2 = 1.0 - sse / var
    return coefs, intercept, fidelity_r2


def explain(model, doc: Document, bp_id: int, cfg: LimeConfig = LimeConfig()) -> Explanation:
    """Full chain: segment, sample masks, score variants, fit surrogate."""
    spans = segment(doc.body).sentence_spans
    n_sentences = len(spans)
    if n_sentences == 0:
        raise ValueError(f"document {doc.doc_id} has no sentences")
    full_prob = float(model.probability(doc.body, bp_id))
    if n_sentences == 1:
        # nothing to remove; report the raw probability and flag it
        return Explanation(doc.doc_id, bp_id, (0.0,), full_prob, math.nan,
                           1, cfg.seed, degenerate=True)
    if cfg.n_samples < n_sentences + 1:
        raise ValueError(
            f"n_samples must be >= {n_sentences + 1} for {n_sentences} sentences"
        )
    local = replace(cfg, seed=task_seed(cfg.seed, doc.doc_id, bp_id))
    samples = []
    for mask in sample_masks(n_sentences, local):
        if mask.all():
            prob = full_prob
        else:
            prob = float(model.probability(masked_text(doc.body, spans, mask), bp_id))
        samples.append(PerturbationSample(tuple(int(v) for v in mask), prob,
                                          kernel_weight(mask, cfg)))
    coefs, intercept, r2 = fit_surrogate(samples, cfg)
    return Explanation(
        doc.doc_id, bp_id, tuple(float(c) for c in coefs), intercept, r2,
        len(samples), cfg.seed,
    )


def explanation_to_dict(exp: Explanation, sentence_spans=None) -> dict:
    data = {
        "doc_id": exp.doc_id,
        "bp_id": exp.bp_id,
        "sentence_weights": list(exp.sentence_weights),
        "intercept": exp.intercept,
        "fidelity_r2": None if math.isnan(exp.fidelity_r2) else exp.fidelity_r2,
        "n_samples": exp.n_samples,
        "seed": exp.seed,
        "degenerate": exp.degenerate,
    }
    if sentence_spans is not None:
        data["sentence_spans"] = [list(s) for s in sentence_spans]
    return data
