"""Linear-family models: L1 logistic regression, unregularized logit MLE
(used for significance testing) and a Pegasos-style linear SVM with Platt
probability calibration."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from nephro_xai.models.base import Predictor, TrainingError

COEF_CAP = 30.0


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -COEF_CAP, COEF_CAP)))


@dataclass
class LogitFit:
    """Maximum-likelihood logistic fit with Wald standard errors."""

    coef: np.ndarray  # without intercept
    intercept: float
    std_errors: np.ndarray
    t_values: np.ndarray
    p_values: np.ndarray
    separation: bool


def fit_logit_mle(
    X: np.ndarray,
    y: np.ndarray,
    max_iter: int = 100,
    tol: float = 1e-10,
) -> LogitFit:
    """Unregularized Newton MLE; standard errors from the inverse observed
    information.  Coefficients are capped at +-30 when separation inflates
    them beyond that range."""
    from scipy import stats

    n, d = X.shape
    design = np.column_stack([X, np.ones(n)])
    w = np.zeros(d + 1)
    for _ in range(max_iter):
        p = _sigmoid(design @ w)
        g = design.T @ (p - y)
        wt = np.maximum(p * (1 - p), 1e-12)
        H = (design * wt[:, None]).T @ design
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, g, rcond=None)[0]
        w -= step
        if np.max(np.abs(step)) < tol:
            break

    separation = bool(np.any(np.abs(w) > COEF_CAP))
    if separation:
        warnings.warn("separation detected; coefficients capped at +-30")
        w = np.clip(w, -COEF_CAP, COEF_CAP)

    p = _sigmoid(design @ w)
    wt = np.maximum(p * (1 - p), 1e-12)
    H = (design * wt[:, None]).T @ design
    try:
        cov = np.linalg.inv(H)
    except np.linalg.LinAlgError:
        cov = np.linalg.pinv(H)
    se = np.sqrt(np.maximum(np.diag(cov), 1e-300))[:d]
    t = w[:d] / se
    pvals = 2.0 * stats.norm.sf(np.abs(t))
    return LogitFit(
        coef=w[:d],
        intercept=float(w[d]),
        std_errors=se,
        t_values=t,
        p_values=pvals,
        separation=separation,
    )


class L1LogisticRegression(Predictor):
    """L1-penalized logistic regression fitted by proximal gradient
    (ISTA); the intercept is unpenalized.  ``class_weight='balanced'``
    weights each class inversely to its frequency."""

    def __init__(self, l1: float = 0.01, class_weight: str | None = "balanced", max_iter: int = 500):
        self.l1 = l1
        self.class_weight = class_weight
        self.max_iter = max_iter
        self.coef: np.ndarray | None = None
        self.intercept = 0.0

    def fit(self, X: np.ndarray, y: np.ndarray):
        n, d = X.shape
        if self.class_weight == "balanced":
            counts = np.bincount(y, minlength=2)
            sw = np.where(y == 1, n / (2.0 * counts[1]), n / (2.0 * counts[0]))
        else:
            sw = np.ones(n)
        sw = sw / sw.sum()

        w = np.zeros(d)
        b = 0.0
        # Lipschitz bound for the weighted logistic gradient
        L = 0.25 * float(np.linalg.norm((X * np.sqrt(sw)[:, None]).T @ (X * np.sqrt(sw)[:, None]), 2)) + 0.25
        step = 1.0 / L
        for _ in range(self.max_iter):
            p = _sigmoid(X @ w + b)
            r = sw * (p - y)
            gw = X.T @ r
            gb = r.sum()
            w_new = w - step * gw
            w_new = np.sign(w_new) * np.maximum(np.abs(w_new) - step * self.l1, 0.0)
            b_new = b - step * gb
            if max(np.max(np.abs(w_new - w)), abs(b_new - b)) < 1e-10:
                w, b = w_new, b_new
                break
            w, b = w_new, b_new
        self.coef, self.intercept = w, float(b)
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        p1 = _sigmoid(np.atleast_2d(X) @ self.coef + self.intercept)
        return np.column_stack([1 - p1, p1])

    def feature_importances(self) -> np.ndarray:
        a = np.abs(self.coef)
        return a / a.sum() if a.sum() > 0 else np.full(len(a), 1.0 / len(a))


class LinearSVM(Predictor):
    """Hinge-loss linear classifier via seeded Pegasos subgradient steps,
    with Platt-calibrated probabilities for the explainers."""

    def __init__(self, lam: float = 1e-3, n_iter: int = 20000, seed: int = 0):
        self.lam = lam
        self.n_iter = n_iter
        self.seed = seed
        self.coef: np.ndarray | None = None
        self.intercept = 0.0
        self.platt_a = -1.0
        self.platt_b = 0.0

    def fit(self, X: np.ndarray, y: np.ndarray):
        n, d = X.shape
        s = np.where(y == 1, 1.0, -1.0)
        rng = np.random.default_rng(self.seed)
        w = np.zeros(d)
        b = 0.0
        for t in range(1, self.n_iter + 1):
            i = int(rng.integers(n))
            eta = 1.0 / (self.lam * t)
            margin = s[i] * (X[i] @ w + b)
            w *= 1.0 - eta * self.lam
            if margin < 1.0:
                w += eta * s[i] * X[i]
                b += eta * s[i]
            if not np.all(np.isfinite(w)):
                raise TrainingError("non-finite loss: diverging LSVM step size")
        self.coef, self.intercept = w, float(b)
        self._fit_platt(X, y)
        return self

    def _fit_platt(self, X: np.ndarray, y: np.ndarray):
        scores = X @ self.coef + self.intercept
        fit = fit_logit_mle(scores[:, None], y.astype(np.float64))
        self.platt_a = float(fit.coef[0])
        self.platt_b = float(fit.intercept)

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        return np.atleast_2d(X) @ self.coef + self.intercept

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        p1 = _sigmoid(self.platt_a * self.decision_function(X) + self.platt_b)
        return np.column_stack([1 - p1, p1])

    def feature_importances(self) -> np.ndarray:
        a = np.abs(self.coef)
        return a / a.sum() if a.sum() > 0 else np.full(len(a), 1.0 / len(a))
