"""Naive Bayes: Gaussian likelihood per numeric feature, category
frequency (with add-one smoothing) per nominal feature."""

from __future__ import annotations

import numpy as np

from nephro_xai.models.base import Predictor

VAR_FLOOR = 1e-9


class NaiveBayes(Predictor):
    def __init__(self, nominal_features: tuple[int, ...] = ()):
        self.nominal_features = tuple(nominal_features)
        self.priors: np.ndarray | None = None
        self.means: np.ndarray | None = None
        self.variances: np.ndarray | None = None
        self.cat_logp: dict[int, np.ndarray] = {}

    def fit(self, X: np.ndarray, y: np.ndarray):
        n, d = X.shape
        self.n_features = d
        self.priors = np.bincount(y, minlength=2) / n
        self.means = np.zeros((2, d))
        self.variances = np.ones((2, d))
        numeric = [j for j in range(d) if j not in self.nominal_features]
        for c in (0, 1):
            Xc = X[y == c]
            self.means[c, numeric] = Xc[:, numeric].mean(axis=0)
            self.variances[c, numeric] = np.maximum(Xc[:, numeric].var(axis=0), VAR_FLOOR)
        for j in self.nominal_features:
            k = int(X[:, j].max()) + 1
            logp = np.zeros((2, k))
            for c in (0, 1):
                counts = np.bincount(X[y == c, j].astype(int), minlength=k) + 1.0
                logp[c] = np.log(counts / counts.sum())
            self.cat_logp[j] = logp
        self._numeric = np.array(numeric, dtype=int)
        return self

    def _joint_log_likelihood(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        ll = np.log(self.priors)[None, :].repeat(len(X), axis=0)
        for c in (0, 1):
            mu = self.means[c, self._numeric]
            var = self.variances[c, self._numeric]
            z = X[:, self._numeric] - mu
            ll[:, c] += np.sum(-0.5 * (np.log(2 * np.pi * var) + z * z / var), axis=1)
            for j in self.nominal_features:
                codes = np.clip(X[:, j].astype(int), 0, self.cat_logp[j].shape[1] - 1)
                ll[:, c] += self.cat_logp[j][c, codes]
        return ll

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        ll = self._joint_log_likelihood(X)
        ll -= ll.max(axis=1, keepdims=True)
        p = np.exp(ll)
        return p / p.sum(axis=1, keepdims=True)

    def feature_importances(self) -> np.ndarray:
        """Standardized class-mean separation per feature, normalized."""
        pooled = np.sqrt(self.variances.mean(axis=0))
        sep = np.abs(self.means[0] - self.means[1]) / np.maximum(pooled, VAR_FLOOR)
        for j in self.nominal_features:
            logp = self.cat_logp[j]
            sep[j] = float(np.abs(np.exp(logp[0]) - np.exp(logp[1])).sum() / 2.0)
        total = sep.sum()
        return sep / total if total > 0 else np.full(self.n_features, 1.0 / self.n_features)
