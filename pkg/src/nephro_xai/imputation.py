"""Complete-case learned-regression imputation.

For every feature with missing cells, one model is fitted per distinct
observed-predictor pattern among the rows missing that feature, using
only the fully complete rows as training data: ordinary least squares
for numeric targets, one-vs-rest logistic models for nominal targets.
Features are filled in ascending order of missing fraction, and a filled
feature may serve as a predictor for features imputed later.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from nephro_xai.tabular import DataTable

MIN_COMPLETE_ROWS = 20


class ImputationError(ValueError):
    pass


@dataclass(frozen=True)
class PatternModel:
    """One fitted model for a (target feature, observed-predictor set) pair."""

    target: str
    predictors: tuple[str, ...]
    kind: str  # "ols" | "logistic" | "fallback_mean" | "fallback_mode"
    coef: np.ndarray | None = None  # ols: (p,); logistic: (n_classes, p)
    intercept: np.ndarray | None = None
    fallback_value: float | int | None = None

    def predict(self, x: np.ndarray) -> float | int:
        if self.kind == "ols":
            return float(x @ self.coef + self.intercept[0])
        if self.kind == "logistic":
            scores = self.coef @ x + self.intercept
            return int(np.argmax(scores))
        return self.fallback_value


@dataclass(frozen=True)
class ImputationPlan:
    order: tuple[str, ...]  # ascending missing fraction
    models: dict[tuple[str, tuple[str, ...]], PatternModel]
    fallbacks: dict[str, PatternModel]
    clamp_ranges: dict[str, tuple[float, float]]
    flagged: tuple[str, ...] = ()  # features that needed a degenerate fallback

    def to_document(self) -> dict:
        return {
            "order": list(self.order),
            "models": [
                {
                    "target": m.target,
                    "predictors": list(m.predictors),
                    "kind": m.kind,
                    "coef": None if m.coef is None else np.asarray(m.coef).tolist(),
                    "intercept": None if m.intercept is None else np.asarray(m.intercept).tolist(),
                    "fallback_value": m.fallback_value,
                }
                for m in self.models.values()
            ],
            "fallbacks": {
                name: {"kind": m.kind, "value": m.fallback_value}
                for name, m in self.fallbacks.items()
            },
            "clamp_ranges": {k: list(v) for k, v in self.clamp_ranges.items()},
            "flagged": list(self.flagged),
        }


@dataclass(frozen=True)
class ImputedTable:
    table: DataTable
    imputed_mask: dict[str, np.ndarray]  # True where a cell was filled
    fallback_cells: int = 0

    def imputed_count(self) -> int:
        return int(sum(m.sum() for m in self.imputed_mask.values()))


def _ols_fit(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float] | None:
    design = np.column_stack([A, np.ones(len(A))])
    if np.linalg.matrix_rank(design) < design.shape[1]:
        return None
    coef, *_ = np.linalg.lstsq(design, b, rcond=None)
    return coef[:-1], float(coef[-1])


def _logistic_binary_fit(A: np.ndarray, y: np.ndarray, max_iter: int = 50) -> tuple[np.ndarray, float] | None:
    """Newton maximum-likelihood fit of P(y=1); tiny ridge for stability."""
    design = np.column_stack([A, np.ones(len(A))])
    w = np.zeros(design.shape[1])
    for _ in range(max_iter):
        z = np.clip(design @ w, -30, 30)
        p = 1 / (1 + np.exp(-z))
        g = design.T @ (p - y)
        W = p * (1 - p)
        H = (design * W[:, None]).T @ design + 1e-8 * np.eye(design.shape[1])
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            return None
        w -= step
        if np.max(np.abs(step)) < 1e-8:
            break
    if not np.all(np.isfinite(w)):
        return None
    return w[:-1], float(w[-1])


def _fit_pattern_model(
    table: DataTable,
    complete: np.ndarray,
    target: str,
    predictors: tuple[str, ...],
) -> PatternModel | None:
    spec = table.spec(target)
    A = np.column_stack([table.columns[p].astype(np.float64)[complete] for p in predictors])
    b = table.columns[target].astype(np.float64)[complete]
    if spec.kind == "numeric":
        fit = _ols_fit(A, b)
        if fit is None:
            return None
        coef, intercept = fit
        return PatternModel(target, predictors, "ols", coef=coef, intercept=np.array([intercept]))
    n_classes = len(spec.categories)
    present = np.unique(b.astype(int))
    if len(present) < 2:
        return None
    coefs = np.zeros((n_classes, len(predictors)))
    intercepts = np.full(n_classes, -np.inf)
    for c in present:
        fit = _logistic_binary_fit(A, (b == c).astype(float))
        if fit is None:
            return None
        coefs[c], intercepts[c] = fit
    return PatternModel(target, predictors, "logistic", coef=coefs, intercept=intercepts)


def _fallback(table: DataTable, name: str) -> PatternModel:
    spec = table.spec(name)
    col = table.columns[name]
    if spec.kind == "numeric":
        value = float(np.nanmean(col))
        return PatternModel(name, (), "fallback_mean", fallback_value=value)
    observed = col[col >= 0]
    mode = int(np.bincount(observed).argmax())
    return PatternModel(name, (), "fallback_mode", fallback_value=mode)


def fit_imputation_plan(table: DataTable) -> ImputationPlan:
    """Fit per-(feature, observed-predictor-pattern) models on complete rows."""
    complete = table.complete_row_mask()
    n_complete = int(complete.sum())
    features = table.feature_names
    fractions = {f: table.missing_mask(f).mean() for f in features}
    with_missing = [f for f in features if fractions[f] > 0]
    order = tuple(sorted(with_missing, key=lambda f: (fractions[f], features.index(f))))

    if not order:
        return ImputationPlan(order=(), models={}, fallbacks={}, clamp_ranges={})
    if n_complete < MIN_COMPLETE_ROWS:
        raise ImputationError(
            f"insufficient complete cases: {n_complete} < {MIN_COMPLETE_ROWS}"
        )

    models: dict[tuple[str, tuple[str, ...]], PatternModel] = {}
    fallbacks: dict[str, PatternModel] = {}
    flagged: list[str] = []
    clamp_ranges: dict[str, tuple[float, float]] = {}

    filled_so_far: set[str] = set()
    for target in order:
        spec = table.spec(target)
        if spec.kind == "numeric":
            observed = table.columns[target]
            observed = observed[~np.isnan(observed)]
            clamp_ranges[target] = (float(observed.min()), float(observed.max()))
        fallbacks[target] = _fallback(table, target)
        missing_rows = np.flatnonzero(table.missing_mask(target))
        patterns: set[tuple[str, ...]] = set()
        for r in missing_rows:
            preds = tuple(
                f
                for f in features
                if f != target and (not table.missing_mask(f)[r] or f in filled_so_far)
            )
            patterns.add(preds)
        for preds in sorted(patterns):
            key = (target, preds)
            if not preds:
                flagged.append(target)
                continue
            model = _fit_pattern_model(table, complete, target, preds)
            if model is None:
                warnings.warn(f"degenerate design for {target!r}; using column fallback")
                flagged.append(target)
                continue
            models[key] = model
        filled_so_far.add(target)

    return ImputationPlan(
        order=order,
        models=models,
        fallbacks=fallbacks,
        clamp_ranges=clamp_ranges,
        flagged=tuple(dict.fromkeys(flagged)),
    )


def apply_imputation(table: DataTable, plan: ImputationPlan) -> ImputedTable:
    """Fill every MISSING cell per the plan, in plan order.

    Observed cells pass through bit-identically; imputed numeric cells
    are clamped to the observed column range; imputed nominal cells are
    maximum-probability category codes.
    """
    features = table.feature_names
    working = {n: np.array(c) for n, c in table.columns.items()}
    imputed_mask = {
        n: np.zeros(table.n_rows, dtype=bool) for n in features
    }
    fallback_cells = 0
    filled_so_far: set[str] = set()

    def is_missing(name: str, r: int) -> bool:
        col = working[name]
        return bool(np.isnan(col[r])) if col.dtype == np.float64 else bool(col[r] < 0)

    for target in plan.order:
        spec = table.spec(target)
        col = working[target]
        missing_rows = [r for r in range(table.n_rows) if is_missing(target, r)]
        for r in missing_rows:
            preds = tuple(
                f
                for f in features
                if f != target and (not is_missing(f, r) or f in filled_so_far)
            )
            model = plan.models.get((target, preds))
            if model is None:
                model = plan.fallbacks.get(target)
                if model is None:
                    raise ImputationError(
                        f"no model or fallback for {target!r} with pattern {preds}"
                    )
                fallback_cells += 1
                value = model.predict(np.empty(0))
            else:
                x = np.array([working[p][r] for p in model.predictors], dtype=np.float64)
                value = model.predict(x)
            if spec.kind == "numeric":
                lo, hi = plan.clamp_ranges[target]
                col[r] = min(max(float(value), lo), hi)
            else:
                col[r] = int(value)
            imputed_mask[target][r] = True
        filled_so_far.add(target)

    out = table.with_columns({n: working[n] for n in features})
    return ImputedTable(table=out, imputed_mask=imputed_mask, fallback_cells=fallback_cells)
