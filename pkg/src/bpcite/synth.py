"""Seeded synthetic corpus generator.

Builds a desk-scale stand-in for a court-decision collection: one topic
vocabulary per precedent with a configurable shared fraction, explicit
citation phrasing consistent with the labels, an unlabeled pool with
mixed signal strength, and the usual metadata quirks (missing dates,
epoch markers, unnamed rapporteurs).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .serial import canonical_json
from .textproc import NormalizerConfig, normalize

_SYLLABLES = [
    "bra", "cur", "den", "fes", "gol", "hir", "jul", "lem", "mor", "nav",
    "pol", "quin", "ril", "sen", "tur", "vad", "xal", "zor", "bet", "cas",
    "dil", "fur", "gral", "lin", "mot", "nup", "pir", "ron", "sol", "tam",
]

_CONNECTORS = ["o", "a", "de", "que", "em", "para", "com", "se", "por", "os"]

_RAPPORTEURS = [
    "alves", "barreto", "costa", "duarte", "esteves", "ferraz", "gomes",
    "horta",
]

_DOC_TYPES = ["Rcl", "Inq", "Pet", "HC", "ADI"]

_CITATION_TEMPLATES = [
    "Conforme a Súmula Vinculante nº {bp}.",
    "Aplica-se a súmula vinculante {bp} ao caso.",
    "Nos termos da Súmula Vinculante n. {bp}.",
]


@dataclass(frozen=True)
class SynthConfig:
    n_classes: int = 10
    per_class: int = 300
    unlabeled_per_class: int = 40
    terms_per_class: int = 50
    shared_fraction: float = 0.3
    shared_pool_size: int = 80
    seed: int = 0


def _make_terms(rng, count, taken: set, normalizer: NormalizerConfig) -> list[str]:
    """Terms that stay distinct after stopword removal and stemming."""
    terms = []
    while len(terms) < count:
        word = "".join(rng.choice(_SYLLABLES, size=3))
        stems = normalize(word, normalizer)
        if len(stems) != 1 or stems[0] in taken:
            continue
        taken.add(stems[0])
        terms.append(word)
    return terms


def _sentence(rng, class_vocab, shared_vocab, mix: float) -> str:
    n_words = int(rng.integers(6, 13))
    words = []
    for _ in range(n_words):
        r = rng.random()
        if r < 0.25:
            pool = _CONNECTORS
        elif r < 0.25 + 0.75 * mix:
            pool = class_vocab
        else:
            pool = shared_vocab
        words.append(pool[int(rng.integers(0, len(pool)))])
    words[0] = words[0].capitalize()
    return " ".join(words) + "."


def _body(rng, class_vocab, shared_vocab, mix: float) -> str:
    paragraphs = []
    for _ in range(int(rng.integers(2, 5))):
        sentences = [
            _sentence(rng, class_vocab, shared_vocab, mix)
            for _ in range(int(rng.integers(2, 6)))
        ]
        paragraphs.append(" ".join(sentences))
    return "\n\n".join(paragraphs)


def _date(rng) -> str | None:
    r = rng.random()
    if r < 0.03:
        return None
    if r < 0.05:
        return "1970-01-01"
    year = int(rng.integers(2008, 2019))
    month = int(rng.integers(1, 13))
    day = int(rng.integers(1, 28))
    return f"{year:04d}-{month:02d}-{day:02d}"


def _rapporteur(rng) -> str | None:
    if rng.random() < 0.05:
        return None
    return "min. " + _RAPPORTEURS[int(rng.integers(0, len(_RAPPORTEURS)))]


def generate_corpus(cfg: SynthConfig = SynthConfig()) -> tuple[list[dict], list[dict]]:
    """Returns (document rows, precedent rows) ready for JSONL."""
    rng = np.random.default_rng(cfg.seed)
    normalizer = NormalizerConfig()
    taken: set = set()
    shared = _make_terms(rng, cfg.shared_pool_size, taken, normalizer)
    n_shared = round(cfg.shared_fraction * cfg.terms_per_class)
    n_exclusive = cfg.terms_per_class - n_shared
    class_vocabs = []
    for _ in range(cfg.n_classes):
        own = _make_terms(rng, n_exclusive, taken, normalizer)
        borrowed = [shared[i] for i in rng.choice(len(shared), size=n_shared, replace=False)]
        class_vocabs.append(own + borrowed)

    precedents = []
    for c in range(cfg.n_classes):
        statement_terms = class_vocabs[c][:20]
        year = 2005 + c % 4
        precedents.append({
            "id": c + 1,
            "statement": " ".join(statement_terms).capitalize() + ".",
            "published": f"{year:04d}-{int(rng.integers(1, 13)):02d}-10",
        })

    documents = []
    serial = 0
    for c in range(cfg.n_classes):
        bp = c + 1
        for _ in range(cfg.per_class):
            serial += 1
            body = _body(rng, class_vocabs[c], shared, mix=float(rng.uniform(0.6, 0.95)))
            template = _CITATION_TEMPLATES[int(rng.integers(0, len(_CITATION_TEMPLATES)))]
            body = body + "\n\n" + template.format(bp=bp)
            doc_type = _DOC_TYPES[int(rng.integers(0, len(_DOC_TYPES)))]
            documents.append({
                "id": f"D{serial:05d}",
                "title": f"{doc_type} {10000 + serial}",
                "body": body,
                "date": _date(rng),
                "rapporteur": _rapporteur(rng),
                "doc_type": doc_type,
                "explicit_bps": [bp],
            })
        for _ in range(cfg.unlabeled_per_class):
            serial += 1
            body = _body(rng, class_vocabs[c], shared, mix=float(rng.uniform(0.3, 0.95)))
            doc_type = _DOC_TYPES[int(rng.integers(0, len(_DOC_TYPES)))]
            documents.append({
                "id": f"D{serial:05d}",
                "title": f"{doc_type} {10000 + serial}",
                "body": body,
                "date": _date(rng),
                "rapporteur": _rapporteur(rng),
                "doc_type": doc_type,
                "explicit_bps": [],
            })
    return documents, precedents


def write_corpus(directory: str | Path, cfg: SynthConfig = SynthConfig()) -> tuple[Path, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    documents, precedents = generate_corpus(cfg)
    docs_path = directory / "documents.jsonl"
    bps_path = directory / "precedents.jsonl"
    with open(docs_path, "w", encoding="utf-8") as fh:
        for row in documents:
            fh.write(canonical_json(row) + "\n")
    with open(bps_path, "w", encoding="utf-8") as fh:
        for row in precedents:
            fh.write(canonical_json(row) + "\n")
    return docs_path, bps_path
