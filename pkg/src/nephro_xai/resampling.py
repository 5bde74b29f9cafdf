"""SMOTE class balancing, stratified k-fold and cross-validated
evaluation with cumulative confusion matrices.

The positive class for precision/recall is class 0 (CKD), so TP counts
rows that are actually and predictedly class 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

POSITIVE_CLASS = 0


class ResamplingError(ValueError):
    pass


@dataclass(frozen=True)
class FoldAssignment:
    k: int
    fold_of: np.ndarray  # per-row fold index in [0, k)

    def test_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of == fold)

    def train_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of != fold)


@dataclass(frozen=True)
class FoldMetrics:
    fold: int
    precision: float
    recall: float
    f1: float
    accuracy: float
    confusion: np.ndarray  # [[TP, FN], [FP, TN]] with class 0 positive


@dataclass(frozen=True)
class EvaluationReport:
    per_fold: list[FoldMetrics]
    confusion: np.ndarray  # cumulative 2x2: rows actual (0,1), cols predicted (0,1)
    precision: float
    recall: float
    f1: float
    accuracy: float
    best_fold: int
    notes: tuple[str, ...] = ()

    def to_document(self) -> dict:
        return {
            "per_fold": [
                {
                    "fold": m.fold,
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "accuracy": m.accuracy,
                    "confusion": m.confusion.tolist(),
                }
                for m in self.per_fold
            ],
            "cumulative_confusion": self.confusion.tolist(),
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "accuracy": self.accuracy,
            "best_fold": self.best_fold,
            "notes": list(self.notes),
        }


def smote_balance(
    X: np.ndarray,
    y: np.ndarray,
    k_neighbors: int = 5,
    seed: int = 0,
    nominal_mask: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Oversample the minority class to parity by interpolating between a
    minority row and one of its k nearest minority neighbors.

    Distances are Euclidean in per-feature standardized space; synthetic
    numeric values lie on the segment between the two parents; nominal
    cells copy the seed row.  Original rows pass through bit-exactly.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    counts = np.bincount(y, minlength=2)
    if counts[0] == counts[1]:
        return X.copy(), y.copy()
    minority = int(np.argmin(counts))
    need = int(abs(counts[0] - counts[1]))
    rows = np.flatnonzero(y == minority)
    if len(rows) <= k_neighbors:
        raise ResamplingError(
            f"minority class has {len(rows)} members; needs > {k_neighbors}"
        )

    std = X.std(axis=0)
    std[std == 0] = 1.0
    Z = X[rows] / std
    d2 = np.sum((Z[:, None, :] - Z[None, :, :]) ** 2, axis=2)
    np.fill_diagonal(d2, np.inf)
    neighbor_ids = np.argsort(d2, axis=1)[:, :k_neighbors]

    rng = np.random.default_rng(seed)
    synthetic = np.empty((need, X.shape[1]))
    for s in range(need):
        a = int(rng.integers(len(rows)))
        b = int(neighbor_ids[a][int(rng.integers(k_neighbors))])
        lam = float(rng.random())
        row = X[rows[a]] + lam * (X[rows[b]] - X[rows[a]])
        if nominal_mask is not None:
            row[nominal_mask] = X[rows[a]][nominal_mask]
        synthetic[s] = row
    Xb = np.vstack([X, synthetic])
    yb = np.concatenate([y, np.full(need, minority, dtype=np.int64)])
    return Xb, yb


def stratified_kfold(labels: np.ndarray, k: int, seed: int = 0) -> FoldAssignment:
    """Seeded stratified fold assignment: per-class shuffle, then deal
    round-robin so fold sizes differ by at most one row per class."""
    labels = np.asarray(labels, dtype=np.int64)
    if k < 2:
        raise ResamplingError("k must be >= 2")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(len(labels), dtype=np.int64)
    for c in np.unique(labels):
        rows = np.flatnonzero(labels == c)
        if len(rows) < k:
            raise ResamplingError(f"class {c} has {len(rows)} members < k={k}")
        rng.shuffle(rows)
        fold_of[rows] = np.arange(len(rows)) % k
    return FoldAssignment(k=k, fold_of=fold_of)


def _metrics_from_confusion(cm: np.ndarray) -> tuple[float, float, float, float]:
    """Macro-averaged precision/recall/F1 plus accuracy from a 2x2 matrix
    (rows actual, cols predicted, class order 0,1)."""
    precisions, recalls, f1s = [], [], []
    for c in (0, 1):
        tp = cm[c, c]
        fp = cm[1 - c, c]
        fn = cm[c, 1 - c]
        p = tp / (tp + fp) if tp + fp > 0 else 0.0
        r = tp / (tp + fn) if tp + fn > 0 else 0.0
        precisions.append(p)
        recalls.append(r)
        f1s.append(2 * p * r / (p + r) if p + r > 0 else 0.0)
    accuracy = (cm[0, 0] + cm[1, 1]) / cm.sum()
    return (
        float(np.mean(precisions)),
        float(np.mean(recalls)),
        float(np.mean(f1s)),
        float(accuracy),
    )


def evaluate_cv(model_spec, X: np.ndarray, y: np.ndarray, folds: FoldAssignment) -> EvaluationReport:
    """Train on k-1 folds, test on the held-out fold, accumulate the
    confusion matrix across folds.  Best fold = highest F1, ties to the
    lowest index.  A training failure aborts with the fold id."""
    from nephro_xai.models import TrainingError, train

    per_fold = []
    cumulative = np.zeros((2, 2), dtype=np.int64)
    for fold in range(folds.k):
        train_rows = folds.train_rows(fold)
        test_rows = folds.test_rows(fold)
        try:
            predictor = train(model_spec, X[train_rows], y[train_rows])
        except TrainingError as exc:
            raise ResamplingError(f"training failed in fold {fold}: {exc}") from exc
        pred = predictor.predict(X[test_rows])
        cm = np.zeros((2, 2), dtype=np.int64)
        for actual, predicted in zip(y[test_rows], pred):
            cm[actual, predicted] += 1
        cumulative += cm
        p, r, f1, acc = _metrics_from_confusion(cm)
        per_fold.append(
            FoldMetrics(fold=fold, precision=p, recall=r, f1=f1, accuracy=acc, confusion=cm)
        )
    p, r, f1, acc = _metrics_from_confusion(cumulative)
    best = max(per_fold, key=lambda m: (m.f1, -m.fold)).fold
    return EvaluationReport(
        per_fold=per_fold,
        confusion=cumulative,
        precision=p,
        recall=r,
        f1=f1,
        accuracy=acc,
        best_fold=best,
    )
