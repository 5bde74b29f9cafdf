"""Feature selection: correlation filter, logit significance, information
gain, variance threshold, wrapper methods (forward / RFE) and the
two-method consensus rule with a clinician exclusion list."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from nephro_xai.models.linear import fit_logit_mle
from nephro_xai.tabular import DataTable, EncodedMatrix

CORRELATION_CUTOFF = 0.5
LOGIT_ALPHA = 0.005
VARIANCE_CUTOFF = 0.75
IG_BINS = 10
FORWARD_TOL = 1e-4
RFE_TARGET_SIZE = 10

#: clinician-driven default exclusions (configuration data, overridable)
DEFAULT_EXCLUSIONS = ("sg", "pcv", "sod", "pot", "rbc", "rbcc")


class SelectionError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureScore:
    feature: str
    score: float
    selected: bool
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SelectionReport:
    method_sets: dict[str, set[str]]
    consensus: set[str]
    exclusions: set[str]
    final: set[str]

    def to_document(self) -> dict:
        return {
            "method_sets": {m: sorted(s) for m, s in sorted(self.method_sets.items())},
            "consensus": sorted(self.consensus),
            "exclusions_applied": sorted(self.exclusions),
            "final": sorted(self.final),
        }


def correlation_with_target(
    encoded: EncodedMatrix,
    threshold: float = CORRELATION_CUTOFF,
) -> list[FeatureScore]:
    """Signed Pearson correlation of each feature with the binary target;
    selected when |r| >= threshold.  Zero-variance features are excluded
    with a warning (r undefined)."""
    y = encoded.y.astype(np.float64)
    yc = y - y.mean()
    ynorm = np.sqrt(np.sum(yc * yc))
    scores = []
    for j, name in enumerate(encoded.feature_names):
        x = encoded.X[:, j]
        xc = x - x.mean()
        xnorm = np.sqrt(np.sum(xc * xc))
        if xnorm == 0 or ynorm == 0:
            warnings.warn(f"feature {name!r} has zero variance; correlation undefined")
            continue
        r = float(np.sum(xc * yc) / (xnorm * ynorm))
        scores.append(FeatureScore(feature=name, score=r, selected=abs(r) >= threshold))
    return scores


def logit_significance(
    encoded: EncodedMatrix,
    alpha: float = LOGIT_ALPHA,
) -> list[FeatureScore]:
    """Wald significance per feature from an unregularized logistic MLE on
    the full feature matrix; significant when the two-sided p < alpha."""
    fit = fit_logit_mle(encoded.X, encoded.y.astype(np.float64))
    return [
        FeatureScore(
            feature=name,
            score=float(fit.t_values[j]),
            selected=bool(fit.p_values[j] < alpha),
            extra={"p_value": float(fit.p_values[j]), "separation": fit.separation},
        )
        for j, name in enumerate(encoded.feature_names)
    ]


def _entropy(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-np.sum(p * np.log2(p)))


def _equal_frequency_bins(x: np.ndarray, n_bins: int) -> np.ndarray:
    edges = np.unique(np.quantile(x, np.linspace(0, 1, n_bins + 1)[1:-1]))
    return np.searchsorted(edges, x, side="left")


def information_gain_ranking(table: DataTable, top_k: int | None = None) -> list[FeatureScore]:
    """IG(feature) = H(target) - H(target | binned feature), numeric
    features discretized into 10 equal-frequency bins; the reported
    feature entropy is over its empirical distinct-value distribution."""
    y = table.columns[table.target]
    h_target = _entropy(np.bincount(y))
    scores = []
    for spec in table.schema:
        if spec.name == table.target:
            continue
        col = table.columns[spec.name].astype(np.float64)
        if np.isnan(col).any() or (table.columns[spec.name].dtype == np.int64 and (table.columns[spec.name] < 0).any()):
            raise SelectionError(f"MISSING cell in {spec.name!r}; impute first")
        _, value_counts = np.unique(col, return_counts=True)
        feature_entropy = _entropy(value_counts)
        if spec.kind == "numeric":
            bins = _equal_frequency_bins(col, IG_BINS)
        else:
            bins = table.columns[spec.name]
        h_cond = 0.0
        n = len(y)
        for b in np.unique(bins):
            mask = bins == b
            h_cond += mask.sum() / n * _entropy(np.bincount(y[mask]))
        ig = max(h_target - h_cond, 0.0)
        scores.append(
            FeatureScore(
                feature=spec.name,
                score=ig,
                selected=True,
                extra={"entropy": feature_entropy},
            )
        )
    scores.sort(key=lambda s: -s.score)
    if top_k is not None:
        scores = [
            FeatureScore(s.feature, s.score, selected=i < top_k, extra=s.extra)
            for i, s in enumerate(scores)
        ]
    return scores


def variance_threshold(
    encoded: EncodedMatrix,
    threshold: float = VARIANCE_CUTOFF,
) -> tuple[set[str], list[FeatureScore]]:
    """Keep features whose raw variance reaches the threshold; the drop
    list is reported with its variances."""
    scores = []
    kept = set()
    for j, name in enumerate(encoded.feature_names):
        var = float(encoded.X[:, j].var())
        keep = var >= threshold
        if keep:
            kept.add(name)
        scores.append(FeatureScore(feature=name, score=var, selected=keep))
    return kept, scores


def _cv_accuracy_logistic(X: np.ndarray, y: np.ndarray, seed: int, k: int = 5) -> float:
    from nephro_xai.models import ModelSpec
    from nephro_xai.resampling import evaluate_cv, stratified_kfold

    folds = stratified_kfold(y, k, seed=seed)
    spec = ModelSpec("LR", {"l1": 1e-4, "class_weight": None, "max_iter": 300}, seed=seed)
    return evaluate_cv(spec, X, y, folds).accuracy


def wrapper_select(
    encoded: EncodedMatrix,
    mode: str,
    target_size: int = RFE_TARGET_SIZE,
    seed: int = 0,
) -> set[str]:
    """Logistic-model wrapper selection.

    forward: greedily add the feature maximizing 5-fold CV accuracy, stop
    when the best addition improves accuracy by < 1e-4.
    rfe: drop the feature with the smallest |standardized coefficient|
    until target_size remain.  Ties break by schema order.
    """
    names = encoded.feature_names
    d = len(names)
    if mode not in ("forward", "rfe"):
        raise SelectionError(f"unknown wrapper mode {mode!r}")
    X, y = encoded.X, encoded.y
    if d == 1:
        return {names[0]}

    if mode == "forward":
        chosen: list[int] = []
        best_acc = 0.0
        remaining = list(range(d))
        while remaining:
            trial = [
                (_cv_accuracy_logistic(X[:, chosen + [j]], y, seed), j) for j in remaining
            ]
            acc, j = max(trial, key=lambda t: (t[0], -t[1]))
            if acc - best_acc < FORWARD_TOL and chosen:
                break
            chosen.append(j)
            remaining.remove(j)
            best_acc = acc
        return {names[j] for j in chosen}

    if target_size >= d:
        raise SelectionError(f"target_size {target_size} >= feature count {d}")
    active = list(range(d))
    std = X.std(axis=0)
    std[std == 0] = 1.0
    while len(active) > target_size:
        fit = fit_logit_mle(X[:, active] / std[active], y.astype(np.float64))
        weakest = int(np.argmin(np.abs(fit.coef)))
        active.pop(weakest)
    return {names[j] for j in active}


def consensus_select(
    method_sets: dict[str, set[str]],
    exclusions: set[str] | tuple[str, ...] = DEFAULT_EXCLUSIONS,
) -> SelectionReport:
    """Consensus = features present in at least two method sets; final =
    consensus minus the clinician exclusion list."""
    if len(method_sets) < 2:
        raise SelectionError("need at least 2 method sets")
    tally: dict[str, int] = {}
    for features in method_sets.values():
        for f in features:
            tally[f] = tally.get(f, 0) + 1
    consensus = {f for f, c in tally.items() if c >= 2}
    exclusions = set(exclusions)
    final = consensus - exclusions
    if not final:
        raise SelectionError("final feature set is empty")
    return SelectionReport(
        method_sets={m: set(s) for m, s in method_sets.items()},
        consensus=consensus,
        exclusions=exclusions & consensus,
        final=final,
    )
