"""CART trees: Gini classification, squared-error regression, export.

Split search is exhaustive over thresholds at midpoints of consecutive
distinct observed values.  Ties on equal gain break toward the lowest
feature index, then the lowest threshold.  Rows with value <= threshold
go to the left child.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nephro_xai.models.base import Predictor, TrainingError

MAX_DEPTH = 16
MIN_SAMPLES_SPLIT = 2
MIN_IMPURITY_DECREASE = 1e-7


@dataclass
class _Node:
    feature: int | None = None
    threshold: float = 0.0
    impurity: float = 0.0
    n_samples: int = 0
    weight: float = 0.0
    class_counts: np.ndarray | None = None  # classification only
    value: float = 0.0  # regression leaf value / class-1 probability
    proba: np.ndarray | None = None
    left: "_Node | None" = None
    right: "_Node | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


@dataclass(frozen=True)
class TreeNode:
    """Serializable tree structure for rendering and audit."""

    feature: int | None
    threshold: float | None
    impurity: float
    sample_fraction: float
    class_counts: tuple[int, int]
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    def to_document(self, feature_names: list[str] | None = None) -> dict:
        doc = {
            "feature": None
            if self.feature is None
            else (feature_names[self.feature] if feature_names else self.feature),
            "threshold": self.threshold,
            "impurity": round(self.impurity, 6),
            "sample_fraction": round(self.sample_fraction, 6),
            "class_counts": list(self.class_counts),
        }
        if self.left is not None:
            doc["left"] = self.left.to_document(feature_names)
            doc["right"] = self.right.to_document(feature_names)
        return doc


def _gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total <= 0:
        return 0.0
    p = counts / total
    return float(1.0 - np.sum(p * p))


def _best_split_classification(
    X: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    feature_ids: np.ndarray,
) -> tuple[int, float, float] | None:
    """Return (feature, threshold, weighted-child impurity) minimizing the
    weighted Gini of the split, or None when no valid split exists."""
    n_classes = 2
    total_w = w.sum()
    best = None  # (impurity, feature, threshold)
    for f in feature_ids:
        values = X[:, f]
        order = np.argsort(values, kind="mergesort")
        sv, sy, sw = values[order], y[order], w[order]
        boundaries = np.flatnonzero(sv[1:] > sv[:-1])  # split after index i
        if boundaries.size == 0:
            continue
        class_w = np.zeros((len(sv), n_classes))
        class_w[np.arange(len(sv)), sy] = sw
        cum = np.cumsum(class_w, axis=0)
        left_w = cum[boundaries]
        right_w = cum[-1] - left_w
        lw = left_w.sum(axis=1)
        rw = right_w.sum(axis=1)
        gini_l = 1.0 - np.sum((left_w / lw[:, None]) ** 2, axis=1)
        gini_r = 1.0 - np.sum((right_w / rw[:, None]) ** 2, axis=1)
        imp = (lw * gini_l + rw * gini_r) / total_w
        thresholds = (sv[boundaries] + sv[boundaries + 1]) / 2.0
        i = int(np.lexsort((thresholds, imp))[0])  # lowest impurity, then threshold
        cand = (float(imp[i]), int(f), float(thresholds[i]))
        if best is None or cand[0] < best[0] - 1e-15:
            best = cand
        elif abs(cand[0] - best[0]) <= 1e-15:
            # tie: lower feature index, then lower threshold
            if (cand[1], cand[2]) < (best[1], best[2]):
                best = cand
    if best is None:
        return None
    return best[1], best[2], best[0]


def _best_split_regression(
    X: np.ndarray,
    y: np.ndarray,
    feature_ids: np.ndarray,
) -> tuple[int, float, float] | None:
    n = len(y)
    best = None
    for f in feature_ids:
        values = X[:, f]
        order = np.argsort(values, kind="mergesort")
        sv, sy = values[order], y[order]
        boundaries = np.flatnonzero(sv[1:] > sv[:-1])
        if boundaries.size == 0:
            continue
        cum = np.cumsum(sy)
        cum2 = np.cumsum(sy * sy)
        nl = boundaries + 1
        nr = n - nl
        sl, sr = cum[boundaries], cum[-1] - cum[boundaries]
        ssl, ssr = cum2[boundaries], cum2[-1] - cum2[boundaries]
        sse = (ssl - sl * sl / nl) + (ssr - sr * sr / nr)
        thresholds = (sv[boundaries] + sv[boundaries + 1]) / 2.0
        i = int(np.lexsort((thresholds, sse))[0])
        cand = (float(sse[i] / n), int(f), float(thresholds[i]))
        if best is None or cand[0] < best[0] - 1e-15:
            best = cand
        elif abs(cand[0] - best[0]) <= 1e-15 and (cand[1], cand[2]) < (best[1], best[2]):
            best = cand
    if best is None:
        return None
    return best[1], best[2], best[0]


class DecisionTreeClassifier(Predictor):
    """Binary CART classifier with Gini impurity."""

    def __init__(
        self,
        max_depth: int = MAX_DEPTH,
        min_samples_split: int = MIN_SAMPLES_SPLIT,
        min_impurity_decrease: float = MIN_IMPURITY_DECREASE,
        max_features: int | str | None = None,
        rng: np.random.Generator | None = None,
    ):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.min_impurity_decrease = min_impurity_decrease
        self.max_features = max_features
        self.rng = rng
        self.root: _Node | None = None
        self.n_features = 0
        self._importances: np.ndarray | None = None

    def _n_candidate_features(self, d: int) -> int:
        mf = self.max_features
        if mf is None:
            return d
        if mf == "sqrt":
            return max(1, int(round(np.sqrt(d))))
        return max(1, min(int(mf), d))

    def fit(self, X: np.ndarray, y: np.ndarray, sample_weight: np.ndarray | None = None):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if len(np.unique(y)) < 2:
            raise TrainingError("degenerate labels: a single class present")
        w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, float)
        self.n_features = X.shape[1]
        self._importances = np.zeros(self.n_features)
        self._root_weight = w.sum()
        self._n_total = len(y)
        self.root = self._build(X, y, w, depth=0)
        total = self._importances.sum()
        if total > 0:
            self._importances = self._importances / total
        return self

    def _make_node(self, y: np.ndarray, w: np.ndarray) -> _Node:
        counts_w = np.zeros(2)
        np.add.at(counts_w, y, w)
        counts = np.bincount(y, minlength=2)
        node = _Node(
            impurity=_gini(counts_w),
            n_samples=len(y),
            weight=float(w.sum()),
            class_counts=counts,
        )
        node.proba = counts_w / counts_w.sum()
        return node

    def _build(self, X, y, w, depth) -> _Node:
        node = self._make_node(y, w)
        if (
            depth >= self.max_depth
            or len(y) < self.min_samples_split
            or node.impurity == 0.0
        ):
            return node
        d = X.shape[1]
        k = self._n_candidate_features(d)
        if k < d and self.rng is not None:
            feature_ids = np.sort(self.rng.choice(d, size=k, replace=False))
        else:
            feature_ids = np.arange(d)
        split = _best_split_classification(X, y, w, feature_ids)
        if split is None:
            return node
        f, threshold, child_impurity = split
        decrease = (node.weight / self._root_weight) * (node.impurity - child_impurity)
        if decrease < self.min_impurity_decrease:
            return node
        mask = X[:, f] <= threshold
        node.feature, node.threshold = f, threshold
        self._importances[f] += node.weight / self._root_weight * (node.impurity - child_impurity)
        node.left = self._build(X[mask], y[mask], w[mask], depth + 1)
        node.right = self._build(X[~mask], y[~mask], w[~mask], depth + 1)
        return node

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        out = np.empty((len(X), 2))
        self._fill_proba(self.root, X, np.arange(len(X)), out)
        return out

    def _fill_proba(self, node: _Node, X, index, out):
        if node.is_leaf:
            out[index] = node.proba
            return
        mask = X[index, node.feature] <= node.threshold
        self._fill_proba(node.left, X, index[mask], out)
        self._fill_proba(node.right, X, index[~mask], out)

    def feature_importances(self) -> np.ndarray:
        imp = self._importances
        if imp.sum() == 0:
            return np.full(self.n_features, 1.0 / self.n_features)
        return imp


class DecisionTreeRegressor:
    """Squared-error CART regressor used as the boosting base learner."""

    def __init__(self, max_depth: int = 3, min_samples_split: int = 2):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.root: _Node | None = None

    def fit(self, X: np.ndarray, y: np.ndarray):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        self.root = self._build(X, y, np.arange(len(y)), depth=0)
        return self

    def _build(self, X, y, index, depth) -> _Node:
        node = _Node(
            n_samples=len(index),
            value=float(y[index].mean()),
            impurity=float(y[index].var()),
        )
        node.member_rows = index  # used by GBM leaf re-estimation
        if depth >= self.max_depth or len(index) < self.min_samples_split:
            return node
        split = _best_split_regression(X[index], y[index], np.arange(X.shape[1]))
        if split is None:
            return node
        f, threshold, _ = split
        mask = X[index, f] <= threshold
        node.feature, node.threshold = f, threshold
        node.left = self._build(X, y, index[mask], depth + 1)
        node.right = self._build(X, y, index[~mask], depth + 1)
        return node

    def leaves(self) -> list[_Node]:
        out = []

        def walk(node):
            if node.is_leaf:
                out.append(node)
            else:
                walk(node.left)
                walk(node.right)

        walk(self.root)
        return out

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        out = np.empty(len(X))
        self._fill(self.root, X, np.arange(len(X)), out)
        return out

    def _fill(self, node, X, index, out):
        if node.is_leaf:
            out[index] = node.value
            return
        mask = X[index, node.feature] <= node.threshold
        self._fill(node.left, X, index[mask], out)
        self._fill(node.right, X, index[~mask], out)


def export_tree(predictor) -> TreeNode:
    """Export the structure of a DT (or one RF member) as TreeNode records."""
    from nephro_xai.models.ensemble import RandomForest

    if isinstance(predictor, RandomForest):
        predictor = predictor.trees[0]
    if not isinstance(predictor, DecisionTreeClassifier) or predictor.root is None:
        raise TrainingError("export_tree requires a fitted tree-family predictor")
    n_total = predictor._n_total

    def convert(node: _Node) -> TreeNode:
        return TreeNode(
            feature=node.feature,
            threshold=None if node.is_leaf else node.threshold,
            impurity=node.impurity,
            sample_fraction=node.n_samples / n_total,
            class_counts=(int(node.class_counts[0]), int(node.class_counts[1])),
            left=None if node.is_leaf else convert(node.left),
            right=None if node.is_leaf else convert(node.right),
        )

    return convert(predictor.root)
