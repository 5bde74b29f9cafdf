"""Predictor interface, model specification and the train() dispatcher."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FAMILIES = ("LR", "NB", "LSVM", "DT", "RF", "ADA", "GBM")


class TrainingError(ValueError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    family: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise TrainingError(f"unknown model family {self.family!r}")
        for key in ("n_estimators", "n_rounds", "max_depth"):
            if key in self.params and self.params[key] < 1:
                raise TrainingError(f"{key} must be >= 1")
        lr = self.params.get("learning_rate")
        if lr is not None and not 0 < lr <= 1:
            raise TrainingError("learning_rate must be in (0, 1]")

    def to_document(self) -> dict:
        return {"family": self.family, "params": dict(self.params), "seed": self.seed}


class Predictor:
    """Trained binary classifier: probabilities plus feature importances."""

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)

    def feature_importances(self) -> np.ndarray:
        raise NotImplementedError


def train(spec: ModelSpec, X: np.ndarray, y: np.ndarray) -> Predictor:
    """Fit the family named by ``spec`` on an encoded feature matrix."""
    from nephro_xai.models import bayes, ensemble, linear
    from nephro_xai.models.tree import DecisionTreeClassifier

    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(np.unique(y)) < 2:
        raise TrainingError("degenerate labels: need both classes present")
    p = dict(spec.params)
    family = spec.family
    if family == "LR":
        return linear.L1LogisticRegression(
            l1=p.get("l1", 0.01),
            class_weight=p.get("class_weight", "balanced"),
            max_iter=p.get("max_iter", 500),
        ).fit(X, y)
    if family == "NB":
        return bayes.NaiveBayes(nominal_features=p.get("nominal_features", ())).fit(X, y)
    if family == "LSVM":
        return linear.LinearSVM(
            lam=p.get("lam", 1e-3),
            n_iter=p.get("n_iter", 20000),
            seed=spec.seed,
        ).fit(X, y)
    if family == "DT":
        return DecisionTreeClassifier(
            max_depth=p.get("max_depth", 16),
            min_samples_split=p.get("min_samples_split", 2),
            min_impurity_decrease=p.get("min_impurity_decrease", 1e-7),
        ).fit(X, y)
    if family == "RF":
        return ensemble.RandomForest(
            n_estimators=p.get("n_estimators", 100),
            max_depth=p.get("max_depth", 16),
            max_features=p.get("max_features", "sqrt"),
            bootstrap=p.get("bootstrap", True),
            seed=spec.seed,
        ).fit(X, y)
    if family == "ADA":
        return ensemble.AdaBoost(
            n_estimators=p.get("n_estimators", 100),
            seed=spec.seed,
        ).fit(X, y)
    if family == "GBM":
        return ensemble.GradientBoosting(
            n_rounds=p.get("n_rounds", 200),
            learning_rate=p.get("learning_rate", 0.1),
            max_depth=p.get("max_depth", 3),
        ).fit(X, y)
    raise TrainingError(f"unknown model family {family!r}")
