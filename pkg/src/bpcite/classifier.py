"""One-vs-rest calibrated classification over embedded documents.

Raw per-class scores come from independently trained binary SVMs; each
class then gets a sigmoid calibration fitted on out-of-fold scores, and
the calibrated per-class values are normalized onto a simplex.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .svm import solve_binary

logger = logging.getLogger(__name__)


class TrainingError(ValueError):
    pass


@dataclass(frozen=True)
class LinearOvrModel:
    classes: tuple[int, ...]
    weights: np.ndarray
    biases: np.ndarray
    reg_C: float


@dataclass(frozen=True)
class PlattCalibrator:
    classes: tuple[int, ...]
    a: np.ndarray
    b: np.ndarray


@dataclass(frozen=True)
class CalibratedClassifier:
    model: LinearOvrModel
    calibrator: PlattCalibrator
    embedding_fingerprint: str = ""

    def __post_init__(self):
        if self.model.classes != self.calibrator.classes:
            raise TrainingError("model and calibrator class lists differ")

    @property
    def classes(self) -> tuple[int, ...]:
        return self.model.classes


def train_ovr(X, y, reg_C: float, classes=None, tol_gap: float = 1e-6) -> LinearOvrModel:
    """Fit one binary hinge-loss SVM per class (positive = that class)."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y)
    if classes is None:
        classes = tuple(sorted(set(int(v) for v in y)))
    else:
        classes = tuple(int(c) for c in classes)
    if len(classes) < 2:
        raise TrainingError("need at least 2 classes")
    gram = X @ X.T
    weights = np.zeros((len(classes), X.shape[1]))
    biases = np.zeros(len(classes))
    for row, c in enumerate(classes):
        mask = y == c
        if not mask.any():
            raise TrainingError(f"class {c} has no positive examples")
        if mask.all():
            raise TrainingError(f"class {c} has no negative examples")
        sol = solve_binary(X, np.where(mask, 1.0, -1.0), reg_C, tol_gap=tol_gap, K=gram)
        weights[row] = sol.w
        biases[row] = sol.b
    return LinearOvrModel(classes, weights, biases, float(reg_C))


def decision_scores(model: LinearOvrModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.weights.shape[1],):
        raise ValueError(f"expected a length-{model.weights.shape[1]} vector, got {x.shape}")
    return model.weights @ x + model.biases


def decision_matrix(model: LinearOvrModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.weights.shape[1]:
        raise ValueError(f"expected (n, {model.weights.shape[1]}) rows, got {X.shape}")
    return X @ model.weights.T + model.biases


def _nll_and_moments(scores, targets, a, b):
    f = a * scores + b
    # split by sign for a stable log(1 + exp(.))
    nll = np.where(
        f >= 0,
        targets * f + np.log1p(np.exp(-np.abs(f))),
        (targets - 1.0) * f + np.log1p(np.exp(-np.abs(f))),
    ).sum()
    return float(nll), _sigmoid(-f)


def fit_platt_binary(scores, positive, max_iter: int = 200) -> tuple[float, float]:
    """Newton fit of p = 1/(1 + exp(A*s + B)) against smoothed targets.

    Runs to gradient infinity-norm <= 1e-10. Positives scoring higher than
    negatives yields A < 0.
    """
    scores = np.asarray(scores, dtype=np.float64)
    positive = np.asarray(positive, dtype=bool)
    n_pos = int(positive.sum())
    n_neg = int((~positive).sum())
    if n_pos == 0 or n_neg == 0:
        raise TrainingError("calibration needs both positive and negative examples")
    targets = np.where(positive, (n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0))
    a, b = 0.0, math.log((n_neg + 1.0) / (n_pos + 1.0))
    nll, p = _nll_and_moments(scores, targets, a, b)
    for _ in range(max_iter):
        d = targets - p
        grad_a = float(d @ scores)
        grad_b = float(d.sum())
        if max(abs(grad_a), abs(grad_b)) <= 1e-10:
            return a, b
        h = p * (1.0 - p)
        haa = float(h @ (scores * scores)) + 1e-12
        hab = float(h @ scores)
        hbb = float(h.sum()) + 1e-12
        det = haa * hbb - hab * hab
        da = -(hbb * grad_a - hab * grad_b) / det
        db = -(haa * grad_b - hab * grad_a) / det
        step = 1.0
        # near the optimum the Armijo decrease drops below the double
        # rounding of nll itself, so allow that much slack
        slack = 1e-12 * (1.0 + abs(nll))
        while step >= 1e-10:
            nll_new, p_new = _nll_and_moments(scores, targets, a + step * da, b + step * db)
            if nll_new <= nll + 1e-4 * step * (grad_a * da + grad_b * db) + slack:
                a, b, nll, p = a + step * da, b + step * db, nll_new, p_new
                break
            step /= 2.0
        else:
            raise TrainingError("calibration line search failed")
    raise TrainingError("calibration did not reach gradient tolerance")


def fit_platt(oof_scores: np.ndarray, y, classes) -> PlattCalibrator:
    """Per-class sigmoid fit; oof_scores column order must match classes."""
    y = np.asarray(y)
    a = np.zeros(len(classes))
    b = np.zeros(len(classes))
    for col, c in enumerate(classes):
        positive = y == c
        a[col], b[col] = fit_platt_binary(oof_scores[:, col], positive)
        s = oof_scores[:, col]
        if s[positive].mean() > s[~positive].mean() and a[col] >= 0:
            logger.warning("class %s: positives score higher but A=%.3g >= 0", c, a[col])
    return PlattCalibrator(tuple(classes), a, b)


def _sigmoid(f: np.ndarray) -> np.ndarray:
    # branch on sign so the exponent never overflows
    out = np.empty_like(f)
    pos = f >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-f[pos]))
    out[~pos] = np.exp(f[~pos]) / (1.0 + np.exp(f[~pos]))
    return out


def predict_proba(clf: CalibratedClassifier, x) -> np.ndarray:
    """Calibrated per-class probabilities, normalized to sum to 1."""
    scores = decision_scores(clf.model, x)
    raw = _sigmoid(-(clf.calibrator.a * scores + clf.calibrator.b))
    raw = np.clip(raw, 1e-300, None)
    return raw / raw.sum()


def predict_proba_matrix(clf: CalibratedClassifier, X) -> np.ndarray:
    scores = decision_matrix(clf.model, X)
    raw = _sigmoid(-(clf.calibrator.a * scores + clf.calibrator.b))
    raw = np.clip(raw, 1e-300, None)
    return raw / raw.sum(axis=1, keepdims=True)


def fit_calibrated(
    X,
    y,
    reg_C: float,
    seed: int = 0,
    embedding_fingerprint: str = "",
    n_folds: int = 3,
) -> CalibratedClassifier:
    """Final model on all rows; calibration on out-of-fold scores.

    Folds are stratified and seeded. Every class must have at least
    n_folds examples so each fold's training complement keeps a positive.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y)
    classes = tuple(sorted(set(int(v) for v in y)))
    rng = np.random.default_rng(seed)
    fold_of = np.empty(len(y), dtype=int)
    for c in classes:
        idx = np.flatnonzero(y == c)
        if len(idx) < n_folds:
            raise TrainingError(f"class {c} has {len(idx)} rows, needs >= {n_folds}")
        fold_of[idx[rng.permutation(len(idx))]] = np.arange(len(idx)) % n_folds
    oof = np.zeros((len(y), len(classes)))
    for fold in range(n_folds):
        held = fold_of == fold
        part = train_ovr(X[~held], y[~held], reg_C, classes=classes)
        oof[held] = decision_matrix(part, X[held])
    calibrator = fit_platt(oof, y, classes)
    model = train_ovr(X, y, reg_C, classes=classes)
    return CalibratedClassifier(model, calibrator, embedding_fingerprint)


# ---------------------------------------------------------------------------
# Evaluation


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    confusion: np.ndarray
    classes: tuple[int, ...]


def report_from_predictions(y_true, y_pred, classes) -> EvalReport:
    index = {c: i for i, c in enumerate(classes)}
    confusion = np.zeros((len(classes), len(classes)), dtype=int)
    for t, p in zip(y_true, y_pred):
        if int(t) not in index:
            raise ValueError(f"true label {t} outside the class list")
        confusion[index[int(t)], index[int(p)]] += 1
    total = confusion.sum()
    support = confusion.sum(axis=1)
    predicted = confusion.sum(axis=0)
    diag = np.diag(confusion)
    # per-class scores; absent denominators count as 0, standard convention
    with np.errstate(invalid="ignore", divide="ignore"):
        prec = np.where(predicted > 0, diag / predicted, 0.0)
        rec = np.where(support > 0, diag / support, 0.0)
        f1 = np.where(prec + rec > 0, 2 * prec * rec / (prec + rec), 0.0)
    weight = support / total
    return EvalReport(
        accuracy=float(diag.sum() / total),
        precision=float((prec * weight).sum()),
        recall=float((rec * weight).sum()),
        f1=float((f1 * weight).sum()),
        confusion=confusion,
        classes=tuple(classes),
    )


def evaluate(clf: CalibratedClassifier, X, y) -> EvalReport:
    """Metrics of calibrated argmax predictions (ties to the lowest class)."""
    if len(y) == 0:
        raise ValueError("labeled set is empty")
    proba = predict_proba_matrix(clf, X)
    preds = [clf.classes[i] for i in np.argmax(proba, axis=1)]
    return report_from_predictions(y, preds, clf.classes)


def grid_search(X_train, y_train, X_val, y_val, grid=(0.01, 0.1, 1.0, 10.0, 100.0)):
    """Pick reg_C by raw-score argmax accuracy on the validation rows.

    Ties prefer the smaller reg_C. Returns (reg_C, EvalReport at that C).
    """
    if not len(grid):
        raise TrainingError("grid must be non-empty")
    best = None
    for c_value in sorted(set(float(g) for g in grid)):
        model = train_ovr(X_train, y_train, c_value)
        scores = decision_matrix(model, X_val)
        preds = [model.classes[i] for i in np.argmax(scores, axis=1)]
        report = report_from_predictions(y_val, preds, model.classes)
        if best is None or report.accuracy > best[1].accuracy:
            best = (c_value, report)
    return best


# ---------------------------------------------------------------------------
# Persistence

CLASSIFIER_FORMAT_TAG = "bpcite-classifier/1"


def classifier_to_dict(clf: CalibratedClassifier, metadata: dict | None = None) -> dict:
    return {
        "format": CLASSIFIER_FORMAT_TAG,
        "classes": list(clf.classes),
        "weights": clf.model.weights.ravel().tolist(),
        "biases": clf.model.biases.tolist(),
        "reg_C": clf.model.reg_C,
        "platt_a": clf.calibrator.a.tolist(),
        "platt_b": clf.calibrator.b.tolist(),
        "embedding_fingerprint": clf.embedding_fingerprint,
        "metadata": dict(metadata or {}),
    }


def classifier_from_dict(data: dict) -> CalibratedClassifier:
    if data.get("format") != CLASSIFIER_FORMAT_TAG:
        raise ValueError(f"unsupported classifier artifact: {data.get('format')!r}")
    classes = tuple(int(c) for c in data["classes"])
    biases = np.array(data["biases"], dtype=float)
    weights = np.array(data["weights"], dtype=float).reshape(len(classes), -1)
    model = LinearOvrModel(classes, weights, biases, float(data["reg_C"]))
    calibrator = PlattCalibrator(
        classes,
        np.array(data["platt_a"], dtype=float),
        np.array(data["platt_b"], dtype=float),
    )
    return CalibratedClassifier(model, calibrator, data.get("embedding_fingerprint", ""))
