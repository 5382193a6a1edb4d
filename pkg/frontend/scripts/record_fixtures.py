"""Record real API payloads as fixtures for the frontend contract tests.

Builds a small deterministic store, serves it in-process, and saves the
response bodies under test/fixtures/. Rerunning regenerates identical
bytes, so a diff here means the wire format actually changed.

    python3 scripts/record_fixtures.py
"""

import sys
import tempfile
from collections import Counter
from pathlib import Path

from fastapi.testclient import TestClient

from bpcite.cli import main
from bpcite.explain import LimeConfig
from bpcite.server import create_app
from bpcite.store import ProjectStore
from bpcite.synth import SynthConfig, write_corpus

FIXTURES = Path(__file__).resolve().parent.parent / "test" / "fixtures"


def build_store() -> ProjectStore:
    base = Path(tempfile.mkdtemp())
    raw = base / "raw"
    write_corpus(raw, SynthConfig(n_classes=4, per_class=14,
                                  unlabeled_per_class=3, seed=7))
    store = base / "store"
    assert main(["ingest", str(raw), "--store", str(store)]) == 0
    assert main(["train", "--store", str(store), "--k", "30",
                 "--grid", "0.1,1"]) == 0
    assert main(["infer", "--store", str(store), "--tc", "0.9"]) == 0
    return ProjectStore(store)


def record() -> None:
    store = build_store()
    records, _ = store.load_citations()
    potential = next(r for r in records if r.kind == "potential")
    explicit = next(r for r in records if r.kind == "explicit")
    (bar_bp, bar_month), n = Counter(
        (r.bp_id, r.month) for r in records if r.month
    ).most_common(1)[0]
    assert n >= 2, "fixture bin must support two clusters"

    client = TestClient(create_app(store, lime_config=LimeConfig(n_samples=80)))
    wanted = {
        "health": "/api/health",
        "bps": "/api/bps",
        "timeline": "/api/timeline",
        "timeline_potential": "/api/timeline?kinds=potential&tc=0.95",
        "bar": f"/api/bar?bp={bar_bp}&month={bar_month}&clusters=2",
        "bar_single": f"/api/bar?bp={bar_bp}&month={bar_month}",
        "document_potential": f"/api/document?id={potential.doc_id}&bp={potential.bp_id}",
        "document_explicit": f"/api/document?id={explicit.doc_id}&bp={explicit.bp_id}",
        "filters": "/api/filters",
    }
    FIXTURES.mkdir(parents=True, exist_ok=True)
    for name, query in wanted.items():
        response = client.get(query)
        assert response.status_code == 200, (query, response.status_code)
        path = FIXTURES / f"{name}.json"
        path.write_bytes(response.content)
        print(f"wrote {path.relative_to(FIXTURES.parent.parent)} ({query})")


if __name__ == "__main__":
    sys.exit(record())
