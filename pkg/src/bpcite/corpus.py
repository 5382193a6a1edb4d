"""Corpus loading, validation, deduplication, sampling, and splitting.

The on-disk layout is two JSONL files: documents.jsonl (one decision per
line) and precedents.jsonl (one binding precedent per line). Malformed
lines are collected into a load report instead of aborting; only duplicate
ids are fatal. All corpus objects are immutable after load.
"""

from __future__ import annotations

import datetime
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

# Documents with no usable publication date carry this marker in source
# data; they stay in training sets but are excluded from date analytics.
EPOCH_MARKER = datetime.date(1970, 1, 1)

UNKNOWN_RAPPORTEUR = "unknown justice"


class CorpusError(ValueError):
    """Fatal corpus defect (duplicate ids, unusable sample request)."""


@dataclass(frozen=True)
class BindingPrecedent:
    bp_id: int
    statement: str
    published: datetime.date | None = None


@dataclass(frozen=True)
class Document:
    doc_id: str
    title: str
    body: str
    date: datetime.date | None
    rapporteur: str
    doc_type: str
    explicit_bps: frozenset[int]


@dataclass(frozen=True)
class LoadIssue:
    source: str
    line: int
    message: str


@dataclass
class LoadReport:
    issues: list[LoadIssue] = field(default_factory=list)
    documents_loaded: int = 0
    precedents_loaded: int = 0

    def add(self, source: str, line: int, message: str) -> None:
        self.issues.append(LoadIssue(source, line, message))

    @property
    def ok(self) -> bool:
        return not self.issues


@dataclass(frozen=True)
class CorpusSplit:
    train: frozenset[str]
    validation: frozenset[str]
    test: frozenset[str]
    seed: int


def _parse_date(value, where: str):
    """ISO date, or None for null/epoch marker. Raises ValueError if malformed."""
    if value is None:
        return None
    if not isinstance(value, str):
        raise ValueError(f"{where} must be an ISO date string or null")
    parsed = datetime.date.fromisoformat(value)
    if parsed == EPOCH_MARKER:
        return None
    return parsed


def _parse_document(record: dict, known_bps: frozenset[int]) -> Document:
    for name in ("id", "title", "body", "doc_type"):
        if name not in record:
            raise ValueError(f"missing field {name!r}")
    doc_id = record["id"]
    body = record["body"]
    if not isinstance(doc_id, str) or not doc_id:
        raise ValueError("field 'id' must be a non-empty string")
    if not isinstance(body, str) or not body.strip():
        raise ValueError("field 'body' must be a non-empty string")
    raw_bps = record.get("explicit_bps", [])
    if not isinstance(raw_bps, list) or not all(isinstance(b, int) for b in raw_bps):
        raise ValueError("field 'explicit_bps' must be an array of integers")
    unknown = sorted(set(raw_bps) - known_bps)
    if unknown:
        raise ValueError(f"explicit_bps reference unknown precedents: {unknown}")
    rapporteur = record.get("rapporteur")
    return Document(
        doc_id=doc_id,
        title=str(record["title"]),
        body=body,
        date=_parse_date(record.get("date"), "field 'date'"),
        rapporteur=rapporteur if rapporteur else UNKNOWN_RAPPORTEUR,
        doc_type=str(record["doc_type"]),
        explicit_bps=frozenset(raw_bps),
    )


def _parse_precedent(record: dict) -> BindingPrecedent:
    bp_id = record.get("id")
    statement = record.get("statement")
    if not isinstance(bp_id, int) or bp_id <= 0:
        raise ValueError("field 'id' must be a positive integer")
    if not isinstance(statement, str) or not statement.strip():
        raise ValueError("field 'statement' must be a non-empty string")
    return BindingPrecedent(
        bp_id=bp_id,
        statement=statement,
        published=_parse_date(record.get("published"), "field 'published'"),
    )


def _read_jsonl(path: Path, source: str, report: LoadReport):
    for line_no, line in enumerate(path.read_text("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            if not isinstance(record, dict):
                raise ValueError("line is not a JSON object")
        except ValueError as exc:
            report.add(source, line_no, f"unparseable line: {exc}")
            continue
        yield line_no, record


def load_corpus(path: str | Path) -> tuple[list[Document], list[BindingPrecedent], LoadReport]:
    """Load documents.jsonl and precedents.jsonl from a directory.

    Every record is either parsed or rejected with a line-numbered issue in
    the report. Duplicate document or precedent ids abort the load.
    """
    root = Path(path)
    report = LoadReport()

    precedents: dict[int, BindingPrecedent] = {}
    for line_no, record in _read_jsonl(root / "precedents.jsonl", "precedents.jsonl", report):
        try:
            bp = _parse_precedent(record)
        except ValueError as exc:
            report.add("precedents.jsonl", line_no, str(exc))
            continue
        if bp.bp_id in precedents:
            raise CorpusError(f"duplicate precedent id {bp.bp_id} at precedents.jsonl:{line_no}")
        precedents[bp.bp_id] = bp

    known = frozenset(precedents)
    documents: dict[str, Document] = {}
    for line_no, record in _read_jsonl(root / "documents.jsonl", "documents.jsonl", report):
        try:
            doc = _parse_document(record, known)
        except ValueError as exc:
            report.add("documents.jsonl", line_no, str(exc))
            continue
        if doc.doc_id in documents:
            raise CorpusError(f"duplicate document id {doc.doc_id!r} at documents.jsonl:{line_no}")
        documents[doc.doc_id] = doc

    report.documents_loaded = len(documents)
    report.precedents_loaded = len(precedents)
    return list(documents.values()), [precedents[k] for k in sorted(precedents)], report


# ---------------------------------------------------------------------------
# Deduplication, sampling, splitting


def content_hash(body: str) -> str:
    """Hash of the whitespace-collapsed, lowercased body."""
    collapsed = " ".join(body.lower().split())
    return hashlib.sha256(collapsed.encode("utf-8")).hexdigest()


def dedupe(docs: list[Document]) -> list[Document]:
    """Keep one document per content hash: the lexicographically smallest id.

    Output preserves the input order of the surviving documents; the result
    is independent of input order up to that tie-break.
    """
    survivor: dict[str, str] = {}
    hashes: dict[str, str] = {}
    for doc in docs:
        hashes[doc.doc_id] = content_hash(doc.body)
    for doc in docs:
        key = hashes[doc.doc_id]
        if key not in survivor or doc.doc_id < survivor[key]:
            survivor[key] = doc.doc_id
    keep = set(survivor.values())
    return [doc for doc in docs if doc.doc_id in keep]


def build_sample(
    docs: list[Document], bp_ids: set[int], per_class: int, seed: int
) -> list[Document]:
    """Draw a balanced single-label sample: per_class documents per precedent.

    Only documents citing exactly one precedent are eligible. Deterministic
    for a fixed seed; classes are processed in sorted order.
    """
    if per_class < 0:
        raise CorpusError("per_class must be non-negative")
    by_class: dict[int, list[Document]] = {bp: [] for bp in sorted(bp_ids)}
    for doc in docs:
        if len(doc.explicit_bps) == 1:
            (bp,) = doc.explicit_bps
            if bp in by_class:
                by_class[bp].append(doc)
    rng = np.random.default_rng(seed)
    sample: list[Document] = []
    for bp in sorted(by_class):
        pool = sorted(by_class[bp], key=lambda d: d.doc_id)
        if len(pool) < per_class:
            raise CorpusError(
                f"class {bp} has {len(pool)} eligible documents, need {per_class}"
            )
        chosen = rng.choice(len(pool), size=per_class, replace=False)
        sample.extend(pool[i] for i in sorted(chosen))
    return sample


def _largest_remainder(n: int, ratios: tuple[float, float, float]) -> tuple[int, int, int]:
    exact = [n * r for r in ratios]
    counts = [int(np.floor(x)) for x in exact]
    remainders = [x - c for x, c in zip(exact, counts)]
    # Ties go to the earlier bucket: train, then validation, then test.
    order = sorted(range(3), key=lambda i: (-remainders[i], i))
    for i in range(n - sum(counts)):
        counts[order[i % 3]] += 1
    return tuple(counts)  # type: ignore[return-value]


def split(
    sample: list[Document],
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> CorpusSplit:
    """Stratified train/validation/test split of a labeled sample.

    Per-class counts follow the largest-remainder rounding of the ratios,
    with ties resolved toward train. Deterministic for a fixed seed.
    """
    if len(ratios) != 3 or abs(sum(ratios) - 1.0) > 1e-9 or min(ratios) < 0:
        raise CorpusError(f"ratios must be three non-negative values summing to 1: {ratios}")
    by_class: dict[int, list[str]] = {}
    for doc in sample:
        if len(doc.explicit_bps) != 1:
            raise CorpusError(f"document {doc.doc_id!r} is not single-labeled")
        (bp,) = doc.explicit_bps
        by_class.setdefault(bp, []).append(doc.doc_id)

    rng = np.random.default_rng(seed)
    parts: tuple[set[str], set[str], set[str]] = (set(), set(), set())
    for bp in sorted(by_class):
        ids = sorted(by_class[bp])
        if len(ids) < 3:
            raise CorpusError(f"class {bp} has fewer than 3 documents")
        counts = _largest_remainder(len(ids), ratios)
        perm = rng.permutation(len(ids))
        cursor = 0
        for part, count in zip(parts, counts):
            part.update(ids[i] for i in perm[cursor : cursor + count])
            cursor += count
    return CorpusSplit(
        train=frozenset(parts[0]),
        validation=frozenset(parts[1]),
        test=frozenset(parts[2]),
        seed=seed,
    )
