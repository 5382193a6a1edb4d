"""Linear hinge-loss SVM solved exactly in the dual.

The primal objective is (1/2)||w||^2 + C * sum_i max(0, 1 - y_i(w.x_i + b))
with an unregularized bias, so the dual carries the equality constraint
sum_i alpha_i y_i = 0 and variables move in pairs (two-coordinate descent
with second-order working-set selection). The returned solution carries a
certified duality gap: the primal is evaluated at the exact minimizing
bias for the returned w, found by scanning the piecewise-linear hinge sum.

Deterministic throughout: selection ties break toward the lowest index and
no randomness is involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SvmConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class BinarySolution:
    w: np.ndarray
    b: float
    alpha: np.ndarray
    gap: float
    iterations: int


def optimal_bias(scores: np.ndarray, y: np.ndarray) -> float:
    """Exact argmin over b of sum_i max(0, 1 - y_i(scores_i + b)).

    The sum is convex piecewise-linear in b with breakpoints y_i - s_i and
    right-derivative #(y=-1, bp <= b) - #(y=+1, bp > b), so the minimum is
    the first breakpoint where that count becomes non-negative.
    """
    breakpoints = y - scores
    order = np.argsort(breakpoints, kind="stable")
    n_pos_gt = int(np.sum(y > 0))
    n_neg_le = 0
    for idx in order:
        if y[idx] > 0:
            n_pos_gt -= 1
        else:
            n_neg_le += 1
        if n_neg_le - n_pos_gt >= 0:
            return float(breakpoints[idx])
    return float(breakpoints[order[-1]])


def hinge_objective(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, C: float) -> float:
    margins = 1.0 - y * (X @ w + b)
    return 0.5 * float(w @ w) + C * float(np.sum(np.clip(margins, 0.0, None)))


def _certify(X, y, C, alpha):
    """(gap, b) for the exact (w, b) this alpha induces.

    Scores are recomputed from alpha so incremental round-off in the solver
    cannot leak into the certificate.
    """
    coef = alpha * y
    w = X.T @ coef
    scores = X @ w
    dual = float(np.sum(alpha)) - 0.5 * float(coef @ scores)
    b = optimal_bias(scores, y)
    margins = 1.0 - y * (scores + b)
    primal = 0.5 * float(coef @ scores) + C * float(np.sum(np.clip(margins, 0.0, None)))
    return primal - dual, b


def solve_binary(
    X: np.ndarray,
    y: np.ndarray,
    C: float,
    tol_gap: float = 1e-6,
    max_iter: int = 2_000_000,
    K: np.ndarray | None = None,
) -> BinarySolution:
    """Train one binary SVM to a certified duality gap <= tol_gap.

    K (the Gram matrix X X^T) may be passed in so one-vs-rest training can
    share it across classes.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = X.shape[0]
    if y.shape != (n,) or not np.all(np.abs(y) == 1.0):
        raise ValueError("labels must be +1/-1, one per row")
    if not np.any(y > 0) or not np.any(y < 0):
        raise ValueError("need at least one positive and one negative example")
    if C <= 0:
        raise ValueError("C must be positive")
    if K is None:
        K = X @ X.T
    diag = np.ascontiguousarray(np.diag(K))

    alpha = np.zeros(n)
    u = np.zeros(n)  # u_i = w . x_i, maintained incrementally
    check_every = 64
    iterations = 0
    gap = np.inf
    bias = 0.0
    certified = False

    while iterations < max_iter:
        viol = y - u  # equals -y_i * (dual gradient)_i
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y < 0) & (alpha < C)) | ((y > 0) & (alpha > 0))
        viol_up = np.where(up, viol, -np.inf)
        i = int(np.argmax(viol_up))
        m = viol_up[i]
        m_low = np.where(low, viol, np.inf).min()
        if m - m_low <= 1e-14:
            gap, bias = _certify(X, y, C, alpha)
            certified = True
            if gap <= tol_gap:
                break
            raise SvmConvergenceError(
                f"pairwise optimality reached but duality gap {gap:.3e} > {tol_gap:.1e}"
            )

        # second-order partner selection: largest guaranteed dual decrease
        ki = K[i]
        quad = np.clip(diag[i] + diag - 2.0 * ki, 1e-12, None)
        diff = m - viol
        eligible = low & (diff > 0)
        gain = np.where(eligible, diff * diff / quad, -np.inf)
        j = int(np.argmax(gain))

        lam = diff[j] / quad[j]
        lam = min(lam, C - alpha[i] if y[i] > 0 else alpha[i])
        lam = min(lam, alpha[j] if y[j] > 0 else C - alpha[j])
        alpha[i] += y[i] * lam
        alpha[j] -= y[j] * lam
        u += lam * (ki - K[j])
        iterations += 1

        if iterations % check_every == 0:
            gap, bias = _certify(X, y, C, alpha)
            certified = True
            if gap <= tol_gap:
                break
            check_every = min(check_every * 2, 2048)
    else:
        raise SvmConvergenceError(
            f"no convergence in {max_iter} iterations (last gap {gap:.3e})"
        )

    if not certified:
        gap, bias = _certify(X, y, C, alpha)
        if gap > tol_gap:
            raise SvmConvergenceError(f"final duality gap {gap:.3e} > {tol_gap:.1e}")
    w = X.T @ (alpha * y)
    return BinarySolution(w, bias, alpha, gap, iterations)
