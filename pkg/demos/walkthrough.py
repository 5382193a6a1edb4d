"""End-to-end tour: synthesize a corpus, train, build the citation index,
and explain one potential citation.

Run from the repository root after `pip install -e .`:

    python3 demos/walkthrough.py [workdir]

Passing a workdir keeps the store around for the other demos.
"""

import json
import sys
import tempfile
from pathlib import Path

from bpcite.cli import main
from bpcite.store import ProjectStore
from bpcite.synth import SynthConfig, write_corpus


def run() -> None:
    workdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp())
    raw = workdir / "raw"
    store_dir = workdir / "store"

    print(f"== workspace: {workdir}")
    print("\n== 1. synthesize a corpus (4 precedents, 14 labeled docs each)")
    cfg = SynthConfig(n_classes=4, per_class=14, unlabeled_per_class=4, seed=7)
    write_corpus(raw, cfg)
    print(f"wrote {raw}/documents.jsonl and {raw}/precedents.jsonl")

    print("\n== 2. ingest: validate, dedupe, persist")
    assert main(["ingest", str(raw), "--store", str(store_dir)]) == 0

    print("\n== 3. train: embedding pipeline + calibrated classifier")
    assert main(["train", "--store", str(store_dir), "--k", "30",
                 "--grid", "0.1,1,10"]) == 0

    print("\n== 4. infer: explicit matches win, the rest need p >= t_c")
    assert main(["infer", "--store", str(store_dir), "--tc", "0.9"]) == 0

    store = ProjectStore(store_dir)
    records, meta = store.load_citations()
    potential = [r for r in records if r.kind == "potential"]
    print(f"\nindex meta: {meta}")
    for r in potential[:5]:
        print(f"  potential: doc={r.doc_id} bp={r.bp_id} "
              f"confidence={r.confidence:.3f} month={r.month}")

    if potential:
        target = potential[0]
        print(f"\n== 5. explain {target.doc_id} vs precedent {target.bp_id}")
        assert main(["explain", "--store", str(store_dir),
                     "--doc", target.doc_id, "--bp", str(target.bp_id),
                     "--samples", "120"]) == 0
        key_dir = store.explanations_dir
        cached = sorted(key_dir.glob("*.json"))
        data = json.loads(cached[0].read_text("utf-8"))
        ranked = sorted(enumerate(data["sentence_weights"]),
                        key=lambda p: -p[1])
        print("\nsentences most supportive of the citation:")
        docs, _, _ = store.load_corpus()
        body = next(d.body for d in docs if d.doc_id == target.doc_id)
        for idx, weight in ranked[:3]:
            start, end = data["sentence_spans"][idx]
            print(f"  {weight:+.4f}  {body[start:end][:70]}")

    print("\n== 6. next steps")
    print(f"  engine eval --store {store_dir} --split test")
    print(f"  engine serve --store {store_dir} --bind 127.0.0.1:8000")


if __name__ == "__main__":
    run()
