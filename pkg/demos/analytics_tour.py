"""Similarity, topics, and timeline analytics over a trained store.

    python3 demos/analytics_tour.py <workdir-from-walkthrough>

Or with no argument it builds a fresh store first (a few seconds).
"""

import sys
import tempfile
from pathlib import Path

import numpy as np

from bpcite.analytics import (
    document_score,
    fit_nmf,
    order_documents,
    paragraph_similarities,
    similarity_histogram,
    timeline_bins,
    topic_keywords,
)
from bpcite.citations import strip_explicit_citations
from bpcite.cli import main
from bpcite.embedding import fit_tfidf, transform_tfidf_matrix
from bpcite.store import ProjectStore
from bpcite.synth import SynthConfig, write_corpus
from bpcite.textproc import normalize


def ensure_store(workdir: Path) -> ProjectStore:
    store_dir = workdir / "store"
    if not (store_dir / "index" / "citations.jsonl").exists():
        raw = workdir / "raw"
        write_corpus(raw, SynthConfig(n_classes=4, per_class=14,
                                      unlabeled_per_class=4, seed=7))
        assert main(["ingest", str(raw), "--store", str(store_dir)]) == 0
        assert main(["train", "--store", str(store_dir), "--k", "30",
                     "--grid", "0.1,1,10"]) == 0
        assert main(["infer", "--store", str(store_dir), "--tc", "0.9"]) == 0
    return ProjectStore(store_dir)


def run() -> None:
    workdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp())
    store = ensure_store(workdir)
    docs, bps, _ = store.load_corpus()
    pipeline = store.load_pipeline()
    records, _ = store.load_citations()
    by_id = {d.doc_id: d for d in docs}

    print("== paragraph similarity against a precedent statement")
    bp = bps[0]
    citing = [r.doc_id for r in records if r.bp_id == bp.bp_id][:4]
    scored = []
    for doc_id in citing:
        sims = paragraph_similarities(pipeline, by_id[doc_id], bp)
        scored.append((doc_id, document_score(sims)))
        top = max(sims, key=lambda s: s.similarity)
        print(f"  {doc_id}: doc score {document_score(sims):.3f}, "
              f"best paragraph #{top.paragraph_index} at {top.similarity:.3f}")
    print(f"ranked: {[d for d, _ in order_documents(scored)]}")
    print(f"histogram over [0,1]: {similarity_histogram([s for _, s in scored])}")

    print("\n== topics among documents citing that precedent")
    seqs = [
        normalize(strip_explicit_citations(by_id[i].body,
                                           pipeline.citation_patterns),
                  pipeline.normalizer)
        for i in citing
    ]
    tfidf = fit_tfidf(seqs, min_df=1)
    X = transform_tfidf_matrix(tfidf, seqs).toarray()
    model = fit_nmf(X, k=2, iters=300, seed=0)
    vocab = sorted(tfidf.vocabulary, key=tfidf.vocabulary.get)
    for t, keywords in enumerate(topic_keywords(model, vocab, m=5)):
        terms = ", ".join(term for term, _ in keywords)
        print(f"  topic {t}: {terms}")
    print(f"  assignment: {np.argmax(model.W, axis=1).tolist()}")

    print("\n== monthly citation timeline (first 8 bins)")
    for b in timeline_bins(records, by_id)[:8]:
        print(f"  bp {b.bp_id} {b.month}: {b.explicit} explicit, "
              f"{b.potential} potential")


if __name__ == "__main__":
    run()
