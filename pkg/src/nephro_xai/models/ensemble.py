"""Ensemble tree models: bagged random forest, AdaBoost (SAMME with
depth-1 stumps) and logistic-loss gradient boosting on regression trees."""

from __future__ import annotations

import numpy as np

from nephro_xai.models.base import Predictor, TrainingError
from nephro_xai.models.tree import DecisionTreeClassifier, DecisionTreeRegressor


class RandomForest(Predictor):
    """Bootstrap-aggregated CART trees with per-split feature subsampling."""

    def __init__(
        self,
        n_estimators: int = 100,
        max_depth: int = 16,
        max_features: int | str | None = "sqrt",
        bootstrap: bool = True,
        seed: int = 0,
    ):
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.seed = seed
        self.trees: list[DecisionTreeClassifier] = []

    def fit(self, X: np.ndarray, y: np.ndarray):
        rng = np.random.default_rng(self.seed)
        n = len(y)
        self.trees = []
        for _ in range(self.n_estimators):
            tree_rng = np.random.default_rng(rng.integers(2**63))
            if self.bootstrap:
                idx = tree_rng.integers(n, size=n)
                Xb, yb = X[idx], y[idx]
                if len(np.unique(yb)) < 2:
                    continue  # degenerate bootstrap resample
            else:
                Xb, yb = X, y
            tree = DecisionTreeClassifier(
                max_depth=self.max_depth,
                max_features=self.max_features,
                rng=tree_rng,
            )
            self.trees.append(tree.fit(Xb, yb))
        if not self.trees:
            raise TrainingError("no tree could be trained")
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        acc = np.zeros((len(np.atleast_2d(X)), 2))
        for tree in self.trees:
            acc += tree.predict_proba(X)
        return acc / len(self.trees)

    def feature_importances(self) -> np.ndarray:
        imp = np.mean([t.feature_importances() for t in self.trees], axis=0)
        return imp / imp.sum()


class AdaBoost(Predictor):
    """SAMME boosting of depth-1 decision stumps.

    A round whose weighted error reaches 0.5 is rejected and boosting
    stops (the ensemble keeps the rounds accepted so far).
    """

    def __init__(self, n_estimators: int = 100, seed: int = 0):
        self.n_estimators = n_estimators
        self.seed = seed
        self.stumps: list[DecisionTreeClassifier] = []
        self.alphas: list[float] = []

    def fit(self, X: np.ndarray, y: np.ndarray):
        n = len(y)
        w = np.full(n, 1.0 / n)
        self.stumps, self.alphas = [], []
        for _ in range(self.n_estimators):
            stump = DecisionTreeClassifier(max_depth=1).fit(X, y, sample_weight=w)
            pred = stump.predict(X)
            err = float(w[pred != y].sum())
            if err >= 0.5:
                break
            if err <= 1e-12:
                self.stumps.append(stump)
                self.alphas.append(20.0)  # effectively perfect round
                break
            alpha = 0.5 * np.log((1 - err) / err)
            self.stumps.append(stump)
            self.alphas.append(alpha)
            w = w * np.exp(alpha * np.where(pred != y, 1.0, -1.0))
            w = w / w.sum()
        if not self.stumps:
            raise TrainingError("first stump had weighted error >= 0.5")
        self.n_features = X.shape[1]
        return self

    def _score(self, X: np.ndarray) -> np.ndarray:
        """Signed ensemble margin in favor of class 1."""
        X = np.atleast_2d(X)
        s = np.zeros(len(X))
        for stump, alpha in zip(self.stumps, self.alphas):
            s += alpha * np.where(stump.predict(X) == 1, 1.0, -1.0)
        return s

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        p1 = 1.0 / (1.0 + np.exp(-2.0 * np.clip(self._score(X), -30, 30)))
        return np.column_stack([1 - p1, p1])

    def feature_importances(self) -> np.ndarray:
        imp = np.zeros(self.n_features)
        for stump, alpha in zip(self.stumps, self.alphas):
            imp += alpha * stump.feature_importances()
        return imp / imp.sum()


class GradientBoosting(Predictor):
    """Gradient boosting with logistic loss; each round fits a squared-error
    regression tree to the residuals and re-estimates leaf values with a
    single Newton step."""

    def __init__(self, n_rounds: int = 200, learning_rate: float = 0.1, max_depth: int = 3):
        self.n_rounds = n_rounds
        self.learning_rate = learning_rate
        self.max_depth = max_depth
        self.trees: list[DecisionTreeRegressor] = []
        self.f0 = 0.0
        self.train_losses: list[float] = []

    @staticmethod
    def _loss(y: np.ndarray, f: np.ndarray) -> float:
        # numerically stable mean logistic loss
        return float(np.mean(np.logaddexp(0.0, f) - y * f))

    def fit(self, X: np.ndarray, y: np.ndarray):
        y = y.astype(np.float64)
        pos = y.mean()
        self.f0 = float(np.log(pos / (1 - pos)))
        f = np.full(len(y), self.f0)
        self.trees = []
        self.train_losses = [self._loss(y, f)]
        for _ in range(self.n_rounds):
            p = 1.0 / (1.0 + np.exp(-f))
            residual = y - p
            tree = DecisionTreeRegressor(max_depth=self.max_depth).fit(X, residual)
            hess = np.maximum(p * (1 - p), 1e-12)
            for leaf in tree.leaves():
                rows = leaf.member_rows
                leaf.value = float(residual[rows].sum() / hess[rows].sum())
            f = f + self.learning_rate * tree.predict(X)
            self.trees.append(tree)
            self.train_losses.append(self._loss(y, f))
        self.n_features = X.shape[1]
        return self

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        f = np.full(len(np.atleast_2d(X)), self.f0)
        for tree in self.trees:
            f += self.learning_rate * tree.predict(X)
        return f

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        p1 = 1.0 / (1.0 + np.exp(-np.clip(self.decision_function(X), -30, 30)))
        return np.column_stack([1 - p1, p1])

    def feature_importances(self) -> np.ndarray:
        """Split-frequency importance weighted by per-node sample count."""
        imp = np.zeros(self.n_features)

        def walk(node):
            if node.is_leaf:
                return
            imp[node.feature] += node.n_samples
            walk(node.left)
            walk(node.right)

        for tree in self.trees:
            walk(tree.root)
        total = imp.sum()
        return imp / total if total > 0 else np.full(self.n_features, 1.0 / self.n_features)
