"""Feature attributions: LIME-style local surrogates, interventional
Shapley values (exact and permutation-sampled), partial dependence and
accumulated local effects.

All explainers are pure functions of (predictor, seed).  The explained
model output defaults to the probability of class 0 (CKD); pass
``class_index`` to explain the other class.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

LIME_RIDGE = 1e-3
LIME_KERNEL_SCALE = 0.75
SHAPLEY_EXACT_MAX_FEATURES = 15


class ExplainError(ValueError):
    pass


@dataclass(frozen=True)
class LocalExplanation:
    conditions: list[tuple[str, str, float]]  # (feature, condition, signed weight)
    intercept: float
    fidelity_r2: float
    predicted_class: int
    probability: float

    def to_document(self) -> dict:
        return {
            "conditions": [
                {"feature": f, "condition": c, "weight": w} for f, c, w in self.conditions
            ],
            "intercept": self.intercept,
            "fidelity_r2": self.fidelity_r2,
            "predicted_class": self.predicted_class,
            "probability": self.probability,
        }


@dataclass(frozen=True)
class ShapleyAttribution:
    phi: np.ndarray
    base_value: float
    feature_names: list[str] | None = None

    def to_document(self) -> dict:
        return {
            "phi": self.phi.tolist(),
            "base_value": self.base_value,
            "feature_names": self.feature_names,
        }


@dataclass(frozen=True)
class GridFunction:
    kind: str  # "PDP1" | "PDP2" | "ALE"
    grid: tuple[np.ndarray, ...]
    values: np.ndarray
    counts: np.ndarray | None = None
    feature_names: tuple[str, ...] = ()

    def to_document(self) -> dict:
        return {
            "kind": self.kind,
            "grid": [g.tolist() for g in self.grid],
            "values": self.values.tolist(),
            "counts": None if self.counts is None else self.counts.tolist(),
            "feature_names": list(self.feature_names),
            "units": "model output (class probability)",
        }


def _output(predictor, X: np.ndarray, class_index: int) -> np.ndarray:
    return predictor.predict_proba(np.atleast_2d(X))[:, class_index]


# ---------------------------------------------------------------------------
# LIME


def _quartile_condition(name: str, value: float, quartiles: np.ndarray) -> str:
    q1, q2, q3 = quartiles
    if value <= q1:
        return f"{name} <= {q1:.4g}"
    if value <= q2:
        return f"{q1:.4g} < {name} <= {q2:.4g}"
    if value <= q3:
        return f"{q2:.4g} < {name} <= {q3:.4g}"
    return f"{name} > {q3:.4g}"


def _quartile_bin(values: np.ndarray, quartiles: np.ndarray) -> np.ndarray:
    return np.searchsorted(quartiles, values, side="left")


def lime_explain(
    predictor,
    row: np.ndarray,
    background: np.ndarray,
    n_samples: int = 1000,
    seed: int = 0,
    feature_names: list[str] | None = None,
    nominal_mask: np.ndarray | None = None,
) -> LocalExplanation:
    """Weighted ridge surrogate on quartile-discretized indicators around
    one instance.

    Numeric features perturb as Gaussians at the background mean/std and
    discretize into background quartiles; nominal features resample from
    the background frequency and use equality indicators.  The proximity
    kernel is exp(-d^2 / w^2) with w = 0.75 sqrt(d) over standardized
    distance.
    """
    row = np.asarray(row, dtype=np.float64)
    background = np.atleast_2d(np.asarray(background, dtype=np.float64))
    if background.shape[0] == 0:
        raise ExplainError("background must be non-empty")
    if n_samples < 100:
        raise ExplainError("n_samples must be >= 100")
    d = len(row)
    if feature_names is None:
        feature_names = [f"x{j}" for j in range(d)]
    if nominal_mask is None:
        nominal_mask = np.zeros(d, dtype=bool)

    rng = np.random.default_rng(seed)
    mean = background.mean(axis=0)
    std = background.std(axis=0)
    std[std == 0] = 1.0

    samples = np.empty((n_samples, d))
    Z = np.empty((n_samples, d))
    conditions: list[tuple[str, str]] = []
    quartiles = {}
    for j in range(d):
        if nominal_mask[j]:
            values = background[:, j]
            cats, freq = np.unique(values, return_counts=True)
            samples[:, j] = rng.choice(cats, size=n_samples, p=freq / freq.sum())
            Z[:, j] = (samples[:, j] == row[j]).astype(float)
            conditions.append((feature_names[j], f"{feature_names[j]} = {row[j]:g}"))
        else:
            samples[:, j] = rng.normal(mean[j], std[j], size=n_samples)
            q = np.quantile(background[:, j], [0.25, 0.5, 0.75])
            quartiles[j] = q
            row_bin = _quartile_bin(np.array([row[j]]), q)[0]
            Z[:, j] = (_quartile_bin(samples[:, j], q) == row_bin).astype(float)
            conditions.append((feature_names[j], _quartile_condition(feature_names[j], row[j], q)))

    proba_row = predictor.predict_proba(row[None, :])[0]
    predicted_class = int(np.argmax(proba_row))
    f = _output(predictor, samples, predicted_class)

    dist2 = np.sum(((samples - row) / std) ** 2, axis=1)
    width = LIME_KERNEL_SCALE * math.sqrt(d)
    weights = np.exp(-dist2 / width**2)

    design = np.column_stack([Z, np.ones(n_samples)])
    WD = design * weights[:, None]
    A = design.T @ WD
    A[:d, :d] += LIME_RIDGE * np.eye(d)  # intercept unpenalized
    try:
        beta = np.linalg.solve(A, design.T @ (weights * f))
    except np.linalg.LinAlgError:
        raise ExplainError("singular surrogate system after ridge") from None

    fitted = design @ beta
    wmean = np.average(f, weights=weights)
    ss_res = float(np.sum(weights * (f - fitted) ** 2))
    ss_tot = float(np.sum(weights * (f - wmean) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    r2 = float(min(max(r2, 0.0), 1.0))

    return LocalExplanation(
        conditions=[
            (name, cond, float(beta[j])) for j, (name, cond) in enumerate(conditions)
        ],
        intercept=float(beta[d]),
        fidelity_r2=r2,
        predicted_class=predicted_class,
        probability=float(proba_row[predicted_class]),
    )


# ---------------------------------------------------------------------------
# Shapley


def _coalition_values(predictor, row, background, class_index) -> np.ndarray:
    """Mean model output over the background with each coalition's
    features replaced by the explained row's values; indexed by bitmask."""
    d = len(row)
    values = np.empty(2**d)
    for mask in range(2**d):
        data = np.array(background)
        for j in range(d):
            if mask >> j & 1:
                data[:, j] = row[j]
        values[mask] = _output(predictor, data, class_index).mean()
    return values


def shapley_exact(
    predictor,
    row: np.ndarray,
    background: np.ndarray,
    class_index: int = 0,
    feature_names: list[str] | None = None,
) -> ShapleyAttribution:
    """Interventional Shapley values by exact coalition enumeration.

    Limited to 15 features (2^d coalitions); use the sampled estimator
    beyond that.
    """
    row = np.asarray(row, dtype=np.float64)
    background = np.atleast_2d(np.asarray(background, dtype=np.float64))
    d = len(row)
    if d > SHAPLEY_EXACT_MAX_FEATURES:
        raise ExplainError(
            f"{d} features exceeds the exact-mode limit "
            f"{SHAPLEY_EXACT_MAX_FEATURES}; use shapley_sampled"
        )
    v = _coalition_values(predictor, row, background, class_index)
    fact = [math.factorial(i) for i in range(d + 1)]
    weights = [fact[s] * fact[d - s - 1] / fact[d] for s in range(d)]
    phi = np.zeros(d)
    for mask in range(2**d):
        s = bin(mask).count("1")
        for j in range(d):
            if not mask >> j & 1:
                phi[j] += weights[s] * (v[mask | (1 << j)] - v[mask])
    return ShapleyAttribution(phi=phi, base_value=float(v[0]), feature_names=feature_names)


def shapley_sampled(
    predictor,
    row: np.ndarray,
    background: np.ndarray,
    n_permutations: int = 2048,
    seed: int = 0,
    class_index: int = 0,
    feature_names: list[str] | None = None,
) -> ShapleyAttribution:
    """Permutation-sampling Shapley estimator; agrees with the exact mode
    within ~0.02 per feature at 2048 permutations on small fixtures."""
    row = np.asarray(row, dtype=np.float64)
    background = np.atleast_2d(np.asarray(background, dtype=np.float64))
    if n_permutations < 64:
        raise ExplainError("n_permutations must be >= 64")
    d = len(row)
    rng = np.random.default_rng(seed)
    base = float(_output(predictor, background, class_index).mean())
    phi = np.zeros(d)
    for _ in range(n_permutations):
        order = rng.permutation(d)
        data = np.array(background)
        prev = base
        for j in order:
            data[:, j] = row[j]
            cur = float(_output(predictor, data, class_index).mean())
            phi[j] += cur - prev
            prev = cur
    phi /= n_permutations
    return ShapleyAttribution(phi=phi, base_value=base, feature_names=feature_names)


# ---------------------------------------------------------------------------
# PDP / ALE


def pdp(
    predictor,
    features: list[int],
    X: np.ndarray,
    grid_size: int = 20,
    class_index: int = 0,
    feature_kinds: list[str] | None = None,
    feature_names: list[str] | None = None,
) -> GridFunction:
    """Partial dependence on one or two numeric features: the grid sits at
    equally spaced percentiles; each value is the mean prediction over X
    with the feature(s) clamped to the grid point."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if len(features) not in (1, 2):
        raise ExplainError("pdp supports 1 or 2 features")
    if feature_kinds is not None:
        for f in features:
            if feature_kinds[f] == "nominal":
                raise ExplainError(f"nominal feature {f} unsupported by pdp")
    grids = []
    for f in features:
        g = np.unique(np.quantile(X[:, f], np.linspace(0, 1, grid_size)))
        grids.append(g)
    names = tuple(
        feature_names[f] if feature_names else f"x{f}" for f in features
    )
    if len(features) == 1:
        values = np.empty(len(grids[0]))
        for i, point in enumerate(grids[0]):
            data = np.array(X)
            data[:, features[0]] = point
            values[i] = _output(predictor, data, class_index).mean()
        return GridFunction("PDP1", (grids[0],), values, feature_names=names)
    values = np.empty((len(grids[0]), len(grids[1])))
    for i, a in enumerate(grids[0]):
        for k, b in enumerate(grids[1]):
            data = np.array(X)
            data[:, features[0]] = a
            data[:, features[1]] = b
            values[i, k] = _output(predictor, data, class_index).mean()
    return GridFunction("PDP2", tuple(grids), values, feature_names=names)


def ale(
    predictor,
    feature: int,
    X: np.ndarray,
    n_bins: int = 10,
    class_index: int = 0,
    feature_names: list[str] | None = None,
) -> GridFunction:
    """Accumulated local effects over quantile bins: per-bin mean of
    f(upper) - f(lower) for member rows, cumulatively summed and centered
    to a bin-count-weighted mean of zero."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if n_bins < 2:
        raise ExplainError("n_bins must be >= 2")
    col = X[:, feature]
    edges = np.unique(np.quantile(col, np.linspace(0, 1, n_bins + 1)))
    if len(edges) < 3:
        raise ExplainError(f"feature {feature} has too few distinct values for ALE")
    if len(edges) < n_bins + 1:
        warnings.warn("quantile collapse: merged empty ALE bins")
    bins = np.clip(np.searchsorted(edges, col, side="left") - 1, 0, len(edges) - 2)

    effects = np.zeros(len(edges) - 1)
    counts = np.zeros(len(edges) - 1, dtype=np.int64)
    for b in range(len(edges) - 1):
        rows = np.flatnonzero(bins == b)
        counts[b] = len(rows)
        if len(rows) == 0:
            continue
        hi = np.array(X[rows])
        lo = np.array(X[rows])
        hi[:, feature] = edges[b + 1]
        lo[:, feature] = edges[b]
        effects[b] = float(
            (_output(predictor, hi, class_index) - _output(predictor, lo, class_index)).mean()
        )
    accumulated = np.cumsum(effects)
    center = np.average(accumulated, weights=np.maximum(counts, 1e-12))
    values = accumulated - center
    name = (feature_names[feature],) if feature_names else (f"x{feature}",)
    return GridFunction("ALE", (edges[1:],), values, counts=counts, feature_names=name)
