"""Tests for mask sampling, surrogate fitting, and the explanation chain."""

import math

import numpy as np
import pytest

from bpcite.classifier import fit_calibrated
from bpcite.corpus import Document
from bpcite.embedding import embed, fit_pipeline
from bpcite.explain import (
    Explanation,
    LimeConfig,
    PerturbationSample,
    evaluate_masked,
    explain,
    fit_surrogate,
    kernel_weight,
    masked_text,
    sample_masks,
    task_seed,
)
from bpcite.inference import ProbabilityModel
from bpcite.textproc import segment


def _doc(body, doc_id="d1"):
    return Document(doc_id, doc_id, body, None, "min. alves", "Rcl", frozenset())


FOUR_SENTENCES = "Alfa um caso. Beta dois casos. Gama tres casos.\n\nDelta quatro casos."


class TestSampleMasks:
    def test_single_sentence_only_full_mask(self):
        masks = sample_masks(1, LimeConfig(n_samples=50, seed=0))
        assert len(masks) == 1
        assert masks[0].tolist() == [1]

    def test_first_mask_full_none_empty(self):
        masks = sample_masks(5, LimeConfig(n_samples=200, seed=3))
        assert len(masks) == 200
        assert masks[0].tolist() == [1, 1, 1, 1, 1]
        for mask in masks:
            assert 1 <= mask.sum() <= 5

    def test_removal_counts_in_range(self):
        masks = sample_masks(6, LimeConfig(n_samples=300, seed=9))
        removed = {6 - int(m.sum()) for m in masks[1:]}
        assert removed <= set(range(1, 6))

    def test_seed_determinism(self):
        a = sample_masks(4, LimeConfig(n_samples=64, seed=5))
        b = sample_masks(4, LimeConfig(n_samples=64, seed=5))
        assert all(np.array_equal(x, y) for x, y in zip(a, b))

    def test_keep_rates_balanced(self):
        masks = sample_masks(4, LimeConfig(n_samples=10_000, seed=1))
        rates = np.mean([m.tolist() for m in masks], axis=0)
        assert np.all(rates >= 0.40) and np.all(rates <= 0.80)

    def test_zero_sentences_rejected(self):
        with pytest.raises(ValueError):
            sample_masks(0, LimeConfig())


class TestMaskedText:
    def test_identity_on_full_mask(self):
        spans = segment(FOUR_SENTENCES).sentence_spans
        assert masked_text(FOUR_SENTENCES, spans, [1, 1, 1, 1]) == FOUR_SENTENCES

    def test_drop_middle_keeps_gaps(self):
        body = "Um caso. Dois casos.\n\nTres casos."
        spans = segment(body).sentence_spans
        assert masked_text(body, spans, [1, 0, 1]) == "Um caso. \n\nTres casos."

    def test_drop_first(self):
        body = "Um caso. Dois casos."
        spans = segment(body).sentence_spans
        assert masked_text(body, spans, [0, 1]) == " Dois casos."


class _CountingModel:
    """Probability is a fixed base plus a bump per surviving marker."""

    def __init__(self, effects, base=0.2):
        self.effects = effects
        self.base = base

    def probability(self, text, bp_id):
        return self.base + sum(v for marker, v in self.effects.items() if marker in text)


class TestEvaluateMasked:
    def test_full_mask_equals_direct_probability(self):
        model = _CountingModel({"Beta": 0.3})
        doc = _doc(FOUR_SENTENCES)
        assert evaluate_masked(model, doc, [1, 1, 1, 1], 1) == model.probability(FOUR_SENTENCES, 1)

    def test_masking_changes_probability(self):
        model = _CountingModel({"Beta": 0.3})
        doc = _doc(FOUR_SENTENCES)
        assert evaluate_masked(model, doc, [1, 0, 1, 1], 1) == pytest.approx(0.2)

    def test_all_zero_mask_rejected(self):
        with pytest.raises(ValueError, match="every sentence"):
            evaluate_masked(_CountingModel({}), _doc(FOUR_SENTENCES), [0, 0, 0, 0], 1)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError, match="length"):
            evaluate_masked(_CountingModel({}), _doc(FOUR_SENTENCES), [1, 1], 1)


class TestKernelWeight:
    def test_full_mask_is_one(self):
        assert kernel_weight([1, 1, 1, 1], LimeConfig()) == 1.0

    def test_half_removed_hand_value(self):
        cfg = LimeConfig(kernel_width=0.5)
        assert kernel_weight([1, 0, 1, 0], cfg) == pytest.approx(math.exp(-1.0))

    def test_decreasing_in_removals(self):
        cfg = LimeConfig()
        weights = []
        for removed in range(6):
            mask = [0] * removed + [1] * (6 - removed)
            weights.append(kernel_weight(mask, cfg))
        assert all(a > b for a, b in zip(weights, weights[1:]))


def _wls_ridge_oracle(Z, y, w, lam):
    A = np.hstack([Z, np.ones((len(y), 1))])
    M = (A * w[:, None]).T @ A
    M[np.arange(Z.shape[1]), np.arange(Z.shape[1])] += lam
    return np.linalg.solve(M, (A * w[:, None]).T @ y)


def _random_samples(rng, n, dim):
    Z = (rng.random((n, dim)) < 0.6).astype(float)
    Z[0] = 1.0
    y = rng.random(n)
    w = rng.random(n) + 0.05
    return [PerturbationSample(tuple(int(v) for v in z), float(p), float(g))
            for z, p, g in zip(Z, y, w)], Z, y, w


class TestFitSurrogate:
    def test_matches_wls_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            samples, Z, y, w = _random_samples(rng, 40, 5)
            lam = float(rng.choice([1e-9, 0.1, 1.0, 10.0]))
            coefs, intercept, _ = fit_surrogate(samples, LimeConfig(ridge_lambda=lam))
            oracle = _wls_ridge_oracle(Z, y, w, lam)
            np.testing.assert_allclose(coefs, oracle[:5], atol=1e-9)
            np.testing.assert_allclose(intercept, oracle[5], atol=1e-9)

    def test_exactly_linear_probs_recovered(self):
        rng = np.random.default_rng(5)
        Z = (rng.random((60, 4)) < 0.5).astype(float)
        Z[0] = 1.0
        y = 0.2 + 0.5 * Z[:, 2]
        samples = [PerturbationSample(tuple(int(v) for v in z), float(p), 1.0)
                   for z, p in zip(Z, y)]
        coefs, intercept, r2 = fit_surrogate(samples, LimeConfig(ridge_lambda=1e-9))
        np.testing.assert_allclose(coefs, [0, 0, 0.5, 0], atol=1e-4)
        assert intercept == pytest.approx(0.2, abs=1e-4)
        assert r2 >= 1 - 1e-6

    def test_constant_probs(self):
        rng = np.random.default_rng(8)
        Z = (rng.random((30, 3)) < 0.5).astype(float)
        Z[0] = 1.0
        samples = [PerturbationSample(tuple(int(v) for v in z), 0.37, 1.0) for z in Z]
        coefs, intercept, r2 = fit_surrogate(samples, LimeConfig(ridge_lambda=1.0))
        np.testing.assert_allclose(coefs, 0.0, atol=1e-9)
        assert intercept == pytest.approx(0.37)
        assert r2 == 1.0

    def test_huge_lambda_shrinks_weights(self):
        rng = np.random.default_rng(9)
        samples, Z, y, w = _random_samples(rng, 50, 4)
        coefs, intercept, _ = fit_surrogate(samples, LimeConfig(ridge_lambda=1e12))
        assert np.max(np.abs(coefs)) <= 1e-9

    def test_singular_without_ridge(self):
        rng = np.random.default_rng(11)
        Z = (rng.random((30, 2)) < 0.5).astype(float)
        Z[0] = 1.0
        Z = np.hstack([Z, Z[:, :1]])  # duplicated column
        samples = [PerturbationSample(tuple(int(v) for v in z), float(rng.random()), 1.0)
                   for z in Z]
        with pytest.raises(ValueError, match="ridge_lambda > 0"):
            fit_surrogate(samples, LimeConfig(ridge_lambda=0.0))

    def test_too_few_samples(self):
        samples = [PerturbationSample((1, 1, 1), 0.5, 1.0)] * 3
        with pytest.raises(ValueError, match="at least"):
            fit_surrogate(samples, LimeConfig())

    def test_ridge_objective_local_optimality(self):
        rng = np.random.default_rng(13)
        samples, Z, y, w = _random_samples(rng, 60, 4)
        lam = 1.0
        coefs, intercept, _ = fit_surrogate(samples, LimeConfig(ridge_lambda=lam))

        def objective(c, b):
            r = y - Z @ c - b
            return float(w @ (r ** 2)) + lam * float(c @ c)

        base = objective(coefs, intercept)
        for i in range(4):
            for delta in (1e-4, -1e-4):
                bumped = coefs.copy()
                bumped[i] += delta
                assert objective(bumped, intercept) >= base - 1e-12
        assert objective(coefs, intercept + 1e-4) >= base - 1e-12


class TestExplain:
    def test_recovers_linear_effects(self):
        model = _CountingModel({"Beta": 0.3}, base=0.2)
        doc = _doc(FOUR_SENTENCES)
        exp = explain(model, doc, 1, LimeConfig(n_samples=120, ridge_lambda=1e-9, seed=0))
        weights = np.array(exp.sentence_weights)
        assert weights[1] == pytest.approx(0.3, abs=1e-3)
        np.testing.assert_allclose(weights[[0, 2, 3]], 0.0, atol=1e-3)
        assert exp.intercept == pytest.approx(0.2, abs=1e-3)
        assert exp.fidelity_r2 >= 1 - 1e-6
        assert not exp.degenerate

    def test_same_seed_same_explanation(self):
        model = _CountingModel({"Alfa": 0.1, "Delta": -0.05}, base=0.4)
        doc = _doc(FOUR_SENTENCES)
        cfg = LimeConfig(n_samples=80, seed=7)
        assert explain(model, doc, 1, cfg) == explain(model, doc, 1, cfg)

    def test_single_sentence_degenerate(self):
        model = _CountingModel({}, base=0.42)
        exp = explain(model, _doc("Frase unica."), 3, LimeConfig(n_samples=50))
        assert exp == Explanation("d1", 3, (0.0,), 0.42, exp.fidelity_r2, 1, 0, True)
        assert math.isnan(exp.fidelity_r2)

    def test_sample_budget_validated(self):
        model = _CountingModel({})
        with pytest.raises(ValueError, match="n_samples"):
            explain(model, _doc(FOUR_SENTENCES), 1, LimeConfig(n_samples=4))

    def test_empty_document_rejected(self):
        with pytest.raises(ValueError, match="no sentences"):
            explain(_CountingModel({}), _doc("   "), 1, LimeConfig())

    def test_task_seeds_differ_per_target(self):
        assert task_seed(0, "d1", 1) != task_seed(0, "d1", 2)
        assert task_seed(0, "d1", 1) != task_seed(0, "d2", 1)
        assert task_seed(0, "d1", 1) != task_seed(1, "d1", 1)
        assert task_seed(3, "dx", 9) == task_seed(3, "dx", 9)


class TestDiscriminativeSentence:
    def test_loaded_sentence_gets_top_weight(self):
        # class 1 vocabulary lives entirely in one sentence of the probe
        class_one = "gol lemure curso materia"
        class_two = "navio porto fluvial regra"
        bodies, labels = [], []
        rng = np.random.default_rng(0)
        for _ in range(10):
            k = int(rng.integers(4, 9))
            bodies.append("Processo sobre " + " ".join(rng.choice(class_one.split(), k)) + ".")
            labels.append(1)
            bodies.append("Processo sobre " + " ".join(rng.choice(class_two.split(), k)) + ".")
            labels.append(2)
        pipeline = fit_pipeline(bodies, k=4, min_df=1, seed=0)
        X = np.vstack([embed(pipeline, b) for b in bodies])
        clf = fit_calibrated(X, labels, reg_C=10.0, seed=0)
        model = ProbabilityModel(pipeline, clf)

        probe = _doc(
            "Registro generico de abertura. Gol lemure curso materia gol lemure. "
            "Encerramento sem conteudo relevante. Arquivo final."
        )
        hits = 0
        for seed in range(100):
            exp = explain(model, probe, 1, LimeConfig(n_samples=40, seed=seed))
            if int(np.argmax(exp.sentence_weights)) == 1:
                hits += 1
        assert hits >= 95
