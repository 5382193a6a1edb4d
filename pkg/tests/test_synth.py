"""Tests for the synthetic corpus generator."""

from bpcite.citations import detect_explicit_citations
from bpcite.corpus import build_sample, dedupe, load_corpus
from bpcite.synth import SynthConfig, generate_corpus, write_corpus

CFG = SynthConfig(n_classes=3, per_class=15, unlabeled_per_class=5, seed=7)


class TestGenerateCorpus:
    def test_shape_and_labels(self):
        docs, bps = generate_corpus(CFG)
        assert len(bps) == 3
        assert [b["id"] for b in bps] == [1, 2, 3]
        labeled = [d for d in docs if d["explicit_bps"]]
        unlabeled = [d for d in docs if not d["explicit_bps"]]
        assert len(labeled) == 45 and len(unlabeled) == 15
        assert all(len(d["explicit_bps"]) == 1 for d in labeled)

    def test_citation_phrases_agree_with_labels(self):
        docs, _ = generate_corpus(CFG)
        for row in docs:
            detected = {bp for bp, _ in detect_explicit_citations(row["body"])}
            assert detected == set(row["explicit_bps"])

    def test_metadata_quirks_present(self):
        docs, _ = generate_corpus(SynthConfig(n_classes=4, per_class=60, seed=1))
        dates = [d["date"] for d in docs]
        assert None in dates
        assert "1970-01-01" in dates
        assert any(d["rapporteur"] is None for d in docs)
        assert {d["doc_type"] for d in docs} <= {"Rcl", "Inq", "Pet", "HC", "ADI"}

    def test_seed_determinism(self):
        assert generate_corpus(CFG) == generate_corpus(CFG)
        other = generate_corpus(SynthConfig(n_classes=3, per_class=15,
                                            unlabeled_per_class=5, seed=8))
        assert other != generate_corpus(CFG)


class TestWriteCorpus:
    def test_loadable_and_sampleable(self, tmp_path):
        write_corpus(tmp_path, CFG)
        docs, bps, report = load_corpus(tmp_path)
        assert report.ok
        assert len(dedupe(docs)) == len(docs)
        sample = build_sample(docs, [b.bp_id for b in bps], per_class=15, seed=0)
        assert len(sample) == 45

    def test_byte_identical_reruns(self, tmp_path):
        d1, p1 = write_corpus(tmp_path / "a", CFG)
        d2, p2 = write_corpus(tmp_path / "b", CFG)
        assert d1.read_bytes() == d2.read_bytes()
        assert p1.read_bytes() == p2.read_bytes()
