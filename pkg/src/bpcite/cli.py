"""Command-line workflow: ingest, train, infer, explain, eval, serve."""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .classifier import (
    EvalReport,
    TrainingError,
    evaluate,
    fit_calibrated,
    grid_search,
)
from .corpus import CorpusError, build_sample, dedupe, load_corpus, split
from .embedding import embed, fit_pipeline, pipeline_fingerprint
from .explain import LimeConfig, explain, explanation_to_dict
from .inference import InferenceConfig, ProbabilityModel, batch_infer
from .serial import canonical_json
from .store import ProjectStore, StoreError
from .textproc import segment

DEFAULT_GRID = "0.01,0.1,1,10,100"


def _tc(value: str) -> float:
    t = float(value)
    if not 0.0 <= t <= 1.0:
        raise argparse.ArgumentTypeError("threshold must be within [0, 1]")
    return t


def _grid(value: str) -> list[float]:
    try:
        parsed = [float(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {value!r}")
    if not parsed:
        raise argparse.ArgumentTypeError("grid must name at least one value")
    return parsed


def _bind(value: str) -> tuple[str, int]:
    host, sep, port = value.rpartition(":")
    if not sep or not port.isdigit():
        raise argparse.ArgumentTypeError("bind address must look like host:port")
    return host or "127.0.0.1", int(port)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="engine",
        description="Precedent-citation modeling over a court-decision corpus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_store(p):
        p.add_argument(
            "--store",
            default=os.environ.get("ENGINE_STORE"),
            help="project store directory (default: ENGINE_STORE)",
        )

    p_ingest = sub.add_parser("ingest", help="validate and persist a corpus")
    p_ingest.add_argument("source", help="directory with documents.jsonl and precedents.jsonl")
    p_ingest.add_argument("--strict", action="store_true",
                          help="exit nonzero when any line is rejected")
    add_store(p_ingest)

    p_train = sub.add_parser("train", help="fit embedding pipeline and classifier")
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--k", type=int, default=50, help="embedding dimensions")
    p_train.add_argument("--min-df", type=int, default=2)
    p_train.add_argument("--grid", type=_grid, default=_grid(DEFAULT_GRID))
    p_train.add_argument("--per-class", type=int, default=None,
                         help="documents sampled per precedent (default: largest balanced)")
    add_store(p_train)

    p_infer = sub.add_parser("infer", help="build the citation index")
    p_infer.add_argument("--tc", type=_tc, default=0.95,
                         help="potential-citation confidence threshold")
    add_store(p_infer)

    p_explain = sub.add_parser("explain", help="sentence-level explanation for one document")
    p_explain.add_argument("--doc", required=True)
    p_explain.add_argument("--bp", required=True, type=int)
    p_explain.add_argument("--samples", type=int, default=1000)
    p_explain.add_argument("--ridge", type=float, default=1.0)
    p_explain.add_argument("--seed", type=int, default=0)
    add_store(p_explain)

    p_eval = sub.add_parser("eval", help="score the stored classifier on a split")
    p_eval.add_argument("--split", choices=("train", "validation", "test"),
                        default="test")
    add_store(p_eval)

    p_serve = sub.add_parser("serve", help="start the read-only HTTP API")
    p_serve.add_argument("--bind", type=_bind, default=_bind("127.0.0.1:8000"))
    p_serve.add_argument("--lime-samples", type=int, default=200,
                         help="perturbation budget for on-demand explanations")
    p_serve.add_argument("--static", default=None,
                         help="directory with a web client to host alongside /api")
    add_store(p_serve)

    return parser


def _store_of(args) -> ProjectStore:
    if not args.store:
        raise StoreError("no store given; pass --store or set ENGINE_STORE")
    return ProjectStore(args.store)


def _report_dict(report: EvalReport) -> dict:
    return {
        "accuracy": report.accuracy,
        "precision": report.precision,
        "recall": report.recall,
        "f1": report.f1,
        "classes": list(report.classes),
        "confusion": report.confusion.tolist(),
    }


def _print_report(name: str, report: EvalReport) -> None:
    print(
        f"{name}: accuracy={report.accuracy:.4f} precision={report.precision:.4f} "
        f"recall={report.recall:.4f} f1={report.f1:.4f}"
    )


def cmd_ingest(args) -> int:
    store = _store_of(args)
    with store.lock():
        documents, precedents, report = load_corpus(args.source)
        kept = dedupe(documents)
        store.save_corpus(kept, precedents, report)
    dropped = len(documents) - len(kept)
    print(
        f"ingested {len(kept)} documents ({dropped} duplicates dropped), "
        f"{len(precedents)} precedents, {len(report.issues)} rejected lines"
    )
    for issue in report.issues:
        print(f"  {issue.source}:{issue.line}: {issue.message}", file=sys.stderr)
    if args.strict and report.issues:
        return 1
    return 0


def cmd_train(args) -> int:
    store = _store_of(args)
    with store.lock():
        documents, precedents, _ = store.load_corpus()
        bp_ids = {bp.bp_id for bp in precedents}
        eligible: dict[int, int] = {}
        for doc in documents:
            if len(doc.explicit_bps) == 1:
                (bp,) = doc.explicit_bps
                if bp in bp_ids:
                    eligible[bp] = eligible.get(bp, 0) + 1
        if len(eligible) < 2:
            raise TrainingError("corpus labels fewer than 2 precedents")
        # only precedents that actually have labeled documents become classes
        per_class = args.per_class or min(eligible.values())
        sample = build_sample(documents, set(eligible), per_class=per_class, seed=args.seed)
        parts = split(sample, seed=args.seed)

        by_id = {doc.doc_id: doc for doc in sample}
        label_of = {doc.doc_id: next(iter(doc.explicit_bps)) for doc in sample}
        train_ids = sorted(parts.train)
        val_ids = sorted(parts.validation)
        test_ids = sorted(parts.test)

        pipeline = fit_pipeline(
            [by_id[i].body for i in train_ids], k=args.k,
            min_df=args.min_df, seed=args.seed,
        )

        def matrix(ids):
            X = np.vstack([embed(pipeline, by_id[i].body) for i in ids])
            y = np.array([label_of[i] for i in ids])
            return X, y

        X_train, y_train = matrix(train_ids)
        X_val, y_val = matrix(val_ids)
        X_test, y_test = matrix(test_ids)

        reg_C, val_report = grid_search(X_train, y_train, X_val, y_val, grid=args.grid)
        print(f"selected reg_C={reg_C:g}")
        clf = fit_calibrated(
            X_train, y_train, reg_C, seed=args.seed,
            embedding_fingerprint=pipeline_fingerprint(pipeline),
        )
        test_report = evaluate(clf, X_test, y_test)
        _print_report("validation", val_report)
        _print_report("test", test_report)

        dates = [doc.date for doc in documents if doc.date is not None]
        store.save_pipeline(pipeline)
        store.save_classifier(clf, metadata={
            "seed": args.seed,
            "reg_C": reg_C,
            "per_class": per_class,
            "data_date": max(dates).isoformat() if dates else None,
            "corpus_fingerprint": store.corpus_fingerprint(),
        })
        store.save_metrics({
            "reg_C": reg_C,
            "validation": _report_dict(val_report),
            "test": _report_dict(test_report),
        })
        store.save_split({
            "seed": args.seed,
            "per_class": per_class,
            "train": train_ids,
            "validation": val_ids,
            "test": test_ids,
        })
    return 0


def cmd_infer(args) -> int:
    store = _store_of(args)
    with store.lock():
        documents, _, _ = store.load_corpus()
        pipeline, clf, _ = store.load_model_pair()
        model = ProbabilityModel(pipeline, clf)
        cfg = InferenceConfig(t_c=args.tc, bp_scope=frozenset(clf.classes))
        records, issues = batch_infer(model, documents, cfg)
        explicit = sum(1 for r in records if r.kind == "explicit")
        store.save_citations(records, meta={
            "t_c": args.tc,
            "records": len(records),
            "explicit": explicit,
            "potential": len(records) - explicit,
            "skipped": len(issues),
        })
    print(
        f"indexed {len(records)} citations ({explicit} explicit, "
        f"{len(records) - explicit} potential) at tc={args.tc:g}; "
        f"{len(issues)} documents skipped"
    )
    for issue in issues:
        print(f"  {issue.doc_id}: {issue.message}", file=sys.stderr)
    return 0


def cmd_explain(args) -> int:
    store = _store_of(args)
    with store.lock():
        documents, _, _ = store.load_corpus()
        by_id = {doc.doc_id: doc for doc in documents}
        if args.doc not in by_id:
            raise StoreError(f"unknown document id {args.doc}")
        doc = by_id[args.doc]
        pipeline, clf, _ = store.load_model_pair()
        if args.bp not in clf.classes:
            raise StoreError(f"precedent {args.bp} is outside the trained classes")
        cfg = LimeConfig(n_samples=args.samples, ridge_lambda=args.ridge, seed=args.seed)
        key = store.explanation_key(args.doc, args.bp, cfg)
        data = store.load_explanation(key)
        if data is None:
            model = ProbabilityModel(pipeline, clf)
            exp = explain(model, doc, args.bp, cfg)
            data = explanation_to_dict(exp, segment(doc.body).sentence_spans)
            store.save_explanation(key, data)
    print(canonical_json(data))
    return 0


def cmd_eval(args) -> int:
    store = _store_of(args)
    documents, _, _ = store.load_corpus()
    pipeline, clf, _ = store.load_model_pair()
    split_info = store.load_split()
    by_id = {doc.doc_id: doc for doc in documents}
    ids = split_info[args.split]
    X = np.vstack([embed(pipeline, by_id[i].body) for i in ids])
    y = np.array([next(iter(by_id[i].explicit_bps)) for i in ids])
    report = evaluate(clf, X, y)
    _print_report(args.split, report)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    store = _store_of(args)
    app = create_app(
        store,
        lime_config=LimeConfig(n_samples=args.lime_samples),
        static_dir=args.static,
    )
    host, port = args.bind
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "train": cmd_train,
    "infer": cmd_infer,
    "explain": cmd_explain,
    "eval": cmd_eval,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (StoreError, CorpusError, TrainingError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
