"""Read-only HTTP API over a trained project store."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import Response

from .analytics import (
    fit_nmf,
    paragraph_similarities,
    assign_topics,
    document_score,
    order_documents,
    similarity_histogram,
    timeline_bins,
    topic_keywords,
)
from .citations import strip_explicit_citations
from .embedding import fit_tfidf, transform_tfidf_matrix
from .explain import LimeConfig, explain, explanation_to_dict
from .inference import EXPLICIT, POTENTIAL, ProbabilityModel
from .serial import canonical_json
from .store import ProjectStore
from .textproc import _TOKEN_RE, normalize, segment

SCHEMA = "bpcite-api/1"

# tokens shorter than this are too generic to highlight as shared terms
MIN_COMMON_TERM_LEN = 4


def _json(payload: dict) -> Response:
    # canonical bytes keep identical queries byte-identical across runs
    return Response(content=canonical_json(payload), media_type="application/json")


def _check_params(request: Request, allowed: set[str]) -> None:
    unknown = set(request.query_params.keys()) - allowed
    if unknown:
        raise HTTPException(400, f"unknown query parameters: {sorted(unknown)}")


def _filters_from(request: Request) -> dict:
    filters: dict = {}
    if "kinds" in request.query_params:
        kinds = [k for k in request.query_params["kinds"].split(",") if k]
        if set(kinds) - {EXPLICIT, POTENTIAL}:
            raise HTTPException(400, f"unknown citation kinds: {kinds}")
        filters["kinds"] = kinds
    if "rapporteur" in request.query_params:
        filters["rapporteur"] = request.query_params["rapporteur"]
    if "doc_type" in request.query_params:
        filters["doc_type"] = request.query_params["doc_type"]
    if "tc" in request.query_params:
        try:
            t_c = float(request.query_params["tc"])
        except ValueError:
            raise HTTPException(400, "tc must be a number")
        if not 0.0 <= t_c <= 1.0:
            raise HTTPException(400, "tc must be within [0, 1]")
        filters["t_c"] = t_c
    return filters


def common_term_spans(body: str, statement: str, normalizer) -> list[tuple[int, int]]:
    """Character spans of body tokens whose normalized form also occurs in
    the precedent statement. Short tokens are skipped."""
    shared = set(normalize(statement, normalizer))
    spans = []
    for match in _TOKEN_RE.finditer(body):
        token = match.group()
        if len(token) < MIN_COMMON_TERM_LEN:
            continue
        normalized = normalize(token, normalizer)
        if normalized and normalized[0] in shared:
            spans.append((match.start(), match.end()))
    return spans


def create_app(
    store: ProjectStore | str,
    lime_config: LimeConfig = LimeConfig(n_samples=200),
    static_dir: str | None = None,
) -> FastAPI:
    if not isinstance(store, ProjectStore):
        store = ProjectStore(store)

    # Fail at startup, not per-request: every artifact loader raises a
    # StoreError naming the command that produces the missing file.
    documents, precedents, _ = store.load_corpus()
    pipeline, clf, model_meta = store.load_model_pair()
    records, inference_meta = store.load_citations()

    doc_by_id = {doc.doc_id: doc for doc in documents}
    bp_by_id = {bp.bp_id: bp for bp in precedents}
    record_by_doc = {record.doc_id: record for record in records}
    model = ProbabilityModel(pipeline, clf)
    version = store.store_version()

    similarity_cache: dict[tuple[str, int], list] = {}
    explanation_cache: dict[str, dict] = {}

    def paragraphs_for(doc_id: str, bp_id: int):
        key = (doc_id, bp_id)
        if key not in similarity_cache:
            similarity_cache[key] = paragraph_similarities(
                pipeline, doc_by_id[doc_id], bp_by_id[bp_id]
            )
        return similarity_cache[key]

    def explanation_for(doc_id: str, bp_id: int) -> dict:
        key = store.explanation_key(doc_id, bp_id, lime_config)
        if key not in explanation_cache:
            # the service never writes to the store; disk cache is read-only
            data = store.load_explanation(key)
            if data is None:
                doc = doc_by_id[doc_id]
                exp = explain(model, doc, bp_id, lime_config)
                data = explanation_to_dict(exp, segment(doc.body).sentence_spans)
            explanation_cache[key] = data
        return explanation_cache[key]

    app = FastAPI(title="bpcite", docs_url=None, redoc_url=None)

    @app.get("/api/health")
    def health(request: Request):
        _check_params(request, set())
        return _json({"schema": SCHEMA, "status": "ok", "version": version})

    @app.get("/api/bps")
    def bps(request: Request):
        _check_params(request, set())
        rows = [
            {
                "bp_id": bp.bp_id,
                "statement": bp.statement,
                "published": bp.published.isoformat() if bp.published else None,
            }
            for bp in sorted(precedents, key=lambda b: b.bp_id)
        ]
        return _json({"schema": SCHEMA, "bps": rows})

    @app.get("/api/timeline")
    def timeline(request: Request):
        _check_params(request, {"kinds", "rapporteur", "doc_type", "tc"})
        try:
            bins = timeline_bins(records, doc_by_id, _filters_from(request))
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        rows = [
            {
                "bp_id": b.bp_id,
                "month": b.month,
                "total": b.total,
                "explicit": b.explicit,
                "potential": b.potential,
            }
            for b in bins
        ]
        return _json({"schema": SCHEMA, "bins": rows})

    @app.get("/api/bar")
    def bar(request: Request):
        _check_params(
            request,
            {"bp", "month", "clusters", "kinds", "rapporteur", "doc_type", "tc"},
        )
        params = request.query_params
        if "bp" not in params or "month" not in params:
            raise HTTPException(400, "bp and month are required")
        try:
            bp_id = int(params["bp"])
            clusters = int(params.get("clusters", "1"))
        except ValueError:
            raise HTTPException(400, "bp and clusters must be integers")
        if clusters < 1:
            raise HTTPException(400, "clusters must be >= 1")
        if bp_id not in bp_by_id:
            raise HTTPException(404, f"unknown precedent {bp_id}")
        month = params["month"]
        filters = _filters_from(request)

        kinds = set(filters.get("kinds") or (EXPLICIT, POTENTIAL))
        t_c = filters.get("t_c")
        selected = []
        for record in records:
            if record.bp_id != bp_id or record.month != month:
                continue
            if record.kind not in kinds:
                continue
            if record.kind == POTENTIAL and t_c is not None and record.confidence < t_c:
                continue
            doc = doc_by_id[record.doc_id]
            if filters.get("rapporteur") is not None and doc.rapporteur != filters["rapporteur"]:
                continue
            if filters.get("doc_type") is not None and doc.doc_type != filters["doc_type"]:
                continue
            selected.append(record)

        scored = []
        for record in selected:
            sims = paragraphs_for(record.doc_id, bp_id)
            scored.append((record.doc_id, document_score(sims)))
        ordered = order_documents(scored)

        topics: list = []
        topic_of: dict[str, int] = {}
        if selected:
            ordered_ids = [doc_id for doc_id, _ in ordered]
            seqs = [
                normalize(
                    strip_explicit_citations(
                        doc_by_id[i].body, pipeline.citation_patterns
                    ),
                    pipeline.normalizer,
                )
                for i in ordered_ids
            ]
            try:
                local_tfidf = fit_tfidf(seqs, min_df=1)
                X = transform_tfidf_matrix(local_tfidf, seqs).toarray()
                nmf = fit_nmf(X, clusters, seed=0)
            except ValueError as exc:
                raise HTTPException(
                    400, f"cannot split {len(seqs)} documents into {clusters} clusters: {exc}"
                )
            vocab = sorted(local_tfidf.vocabulary, key=local_tfidf.vocabulary.get)
            topics = [
                [[term, weight] for term, weight in column]
                for column in topic_keywords(nmf, vocab, m=10)
            ]
            for doc_id, topic in zip(ordered_ids, assign_topics(nmf).tolist()):
                topic_of[doc_id] = topic

        rows = []
        for doc_id, score in ordered:
            record = record_by_doc[doc_id]
            doc = doc_by_id[doc_id]
            rows.append({
                "doc_id": doc_id,
                "doc_type": doc.doc_type,
                "kind": record.kind,
                "confidence": record.confidence,
                "score": score,
                "topic": topic_of.get(doc_id),
                "paragraphs": [
                    {
                        "index": sim.paragraph_index,
                        "length": sim.paragraph_length,
                        "similarity": sim.similarity,
                    }
                    for sim in paragraphs_for(doc_id, bp_id)
                ],
            })
        histogram = similarity_histogram([score for _, score in ordered])

        return _json({
            "schema": SCHEMA,
            "bp_id": bp_id,
            "month": month,
            "documents": rows,
            "topics": topics,
            "histogram": histogram,
        })

    @app.get("/api/document")
    def document(request: Request):
        _check_params(request, {"id", "bp"})
        params = request.query_params
        if "id" not in params or "bp" not in params:
            raise HTTPException(400, "id and bp are required")
        doc = doc_by_id.get(params["id"])
        if doc is None:
            raise HTTPException(404, f"unknown document {params['id']}")
        try:
            bp_id = int(params["bp"])
        except ValueError:
            raise HTTPException(400, "bp must be an integer")
        bp = bp_by_id.get(bp_id)
        if bp is None:
            raise HTTPException(404, f"unknown precedent {bp_id}")

        seg = segment(doc.body)
        sims = paragraphs_for(doc.doc_id, bp_id)
        record = record_by_doc.get(doc.doc_id)
        citation = None
        if record is not None and record.bp_id == bp_id:
            citation = {"kind": record.kind, "confidence": record.confidence}

        lime = None
        if citation is not None and citation["kind"] == POTENTIAL:
            lime = explanation_for(doc.doc_id, bp_id)

        return _json({
            "schema": SCHEMA,
            "doc_id": doc.doc_id,
            "title": doc.title,
            "doc_type": doc.doc_type,
            "date": doc.date.isoformat() if doc.date else None,
            "rapporteur": doc.rapporteur,
            "body": doc.body,
            "sentence_spans": [list(span) for span in seg.sentence_spans],
            "paragraph_spans": [list(span) for span in seg.paragraph_spans],
            "paragraphs": [
                {
                    "index": sim.paragraph_index,
                    "length": sim.paragraph_length,
                    "similarity": sim.similarity,
                }
                for sim in sims
            ],
            "common_terms": [
                list(span)
                for span in common_term_spans(doc.body, bp.statement, pipeline.normalizer)
            ],
            "citation": citation,
            "lime": lime,
        })

    @app.get("/api/filters")
    def filters_endpoint(request: Request):
        _check_params(request, set())
        rapporteurs = sorted({d.rapporteur for d in documents if d.rapporteur})
        doc_types = sorted({d.doc_type for d in documents if d.doc_type})
        return _json({
            "schema": SCHEMA,
            "rapporteurs": rapporteurs,
            "doc_types": doc_types,
        })

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        # the API routes above take precedence; the mount only hosts the
        # bundled web client so it runs same-origin
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app
