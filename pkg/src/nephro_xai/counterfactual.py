"""Example-based explanations: counterfactual search and contrastive
explanations (pertinent negatives / pertinent positives).

Distances are weighted L1 in MAD-normalized units (median absolute
deviation per feature; zero MAD falls back to the standard deviation,
then to 1).  Nominal features mutate by category swap at distance 1 per
change.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SPARSITY_PENALTY = 0.1
DEFAULT_K = 5
MIN_BUDGET = 1000
BISECTION_STEPS = 40

#: a clinician cannot change a patient's age; overridable per call
DEFAULT_IMMUTABLES = ("age",)


class CounterfactualError(ValueError):
    def __init__(self, message: str, best_attempt: np.ndarray | None = None):
        super().__init__(message)
        self.best_attempt = best_attempt


@dataclass(frozen=True)
class Counterfactual:
    row: np.ndarray
    predicted_class: int
    probability: float
    distance: float
    changed: np.ndarray  # boolean mask over features

    def to_document(self, feature_names: list[str] | None = None) -> dict:
        return {
            "row": self.row.tolist(),
            "predicted_class": self.predicted_class,
            "probability": self.probability,
            "distance": self.distance,
            "changed": [
                feature_names[j] if feature_names else j
                for j in np.flatnonzero(self.changed)
            ],
        }


@dataclass(frozen=True)
class CounterfactualSet:
    original: np.ndarray
    original_class: int
    original_probability: float
    target_class: int
    counterfactuals: list[Counterfactual]  # sorted by ascending distance
    feature_names: list[str] | None = None

    def to_document(self) -> dict:
        return {
            "original": self.original.tolist(),
            "original_class": self.original_class,
            "original_probability": self.original_probability,
            "target_class": self.target_class,
            "feature_names": self.feature_names,
            "counterfactuals": [
                c.to_document(self.feature_names) for c in self.counterfactuals
            ],
        }


@dataclass(frozen=True)
class CEMResult:
    mode: str  # "pertinent_negative" | "pertinent_positive"
    delta: np.ndarray | None  # PN: row + delta flips the class
    retained: np.ndarray | None  # PP: boolean mask of kept features
    masked_row: np.ndarray | None  # PP: non-retained features at background medians
    sparsity: int
    achieved_class: int
    probability: float
    flagged: bool = False  # PP: no proper subset preserved the class


def feature_scales(X: np.ndarray) -> np.ndarray:
    """MAD per feature with std-then-1 fallback for degenerate columns."""
    X = np.atleast_2d(X)
    med = np.median(X, axis=0)
    mad = np.median(np.abs(X - med), axis=0)
    std = X.std(axis=0)
    scale = np.where(mad > 0, mad, std)
    return np.where(scale > 0, scale, 1.0)


def _distance(row: np.ndarray, cand: np.ndarray, scales: np.ndarray, nominal_mask: np.ndarray) -> float:
    diff = np.abs(cand - row) / scales
    diff[nominal_mask] = (cand[nominal_mask] != row[nominal_mask]).astype(float)
    return float(diff.sum())


def _objective(row, cand, scales, nominal_mask) -> float:
    changed = _changed_mask(row, cand)
    return _distance(row, cand, scales, nominal_mask) + SPARSITY_PENALTY * int(changed.sum())


def _changed_mask(row: np.ndarray, cand: np.ndarray) -> np.ndarray:
    return cand != row


def counterfactual_search(
    predictor,
    row: np.ndarray,
    target_class: int,
    X: np.ndarray,
    k: int = DEFAULT_K,
    immutables: set[int] | tuple[int, ...] = (),
    budget: int = MIN_BUDGET,
    seed: int = 0,
    nominal_mask: np.ndarray | None = None,
    categories: dict[int, int] | None = None,
    feature_names: list[str] | None = None,
) -> CounterfactualSet:
    """Seeded random candidate sampling inside observed feature ranges,
    then per-feature coordinate bisection toward the original.

    Objective = MAD-weighted L1 distance + 0.1 x changed-feature count.
    Returns the k best valid, pairwise distinct candidates.
    """
    if budget < MIN_BUDGET:
        raise CounterfactualError(f"budget must be >= {MIN_BUDGET}")
    row = np.asarray(row, dtype=np.float64)
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    d = len(row)
    if nominal_mask is None:
        nominal_mask = np.zeros(d, dtype=bool)
    immutables = set(immutables)
    mutable = [j for j in range(d) if j not in immutables]
    if not mutable:
        raise CounterfactualError("no mutable features")

    proba = predictor.predict_proba(row[None, :])[0]
    original_class = int(np.argmax(proba))
    scales = feature_scales(X)
    lo, hi = X.min(axis=0), X.max(axis=0)

    if target_class == original_class:
        zero = Counterfactual(
            row=row.copy(),
            predicted_class=original_class,
            probability=float(proba[original_class]),
            distance=0.0,
            changed=np.zeros(d, dtype=bool),
        )
        return CounterfactualSet(
            original=row,
            original_class=original_class,
            original_probability=float(proba[original_class]),
            target_class=target_class,
            counterfactuals=[zero],
            feature_names=feature_names,
        )

    rng = np.random.default_rng(seed)
    valid: dict[tuple, Counterfactual] = {}
    best_invalid: tuple[float, np.ndarray] | None = None

    def classify(cand: np.ndarray) -> tuple[int, float]:
        p = predictor.predict_proba(cand[None, :])[0]
        c = int(np.argmax(p))
        return c, float(p[target_class])

    def _batch_is_target(rows: np.ndarray) -> np.ndarray:
        p = predictor.predict_proba(rows)
        return np.argmax(p, axis=1) == target_class

    def refine_batch(cands: np.ndarray) -> np.ndarray:
        """Per candidate, shrink each changed feature toward the original
        (reset shortcut, then coordinate bisection) while the candidate
        still classifies as the target class.  Candidates advance in lock
        step so every probe is one batched model call; the per-candidate
        probe sequence is identical to refining them one at a time."""
        cands = cands.copy()
        pending = [[j for j in mutable if cands[i, j] != row[j]] for i in range(len(cands))]
        while any(pending):
            active = [i for i in range(len(cands)) if pending[i]]
            feat = {i: pending[i].pop(0) for i in active}
            # reset-to-original shortcut
            trials = cands[active].copy()
            for t, i in enumerate(active):
                trials[t, feat[i]] = row[feat[i]]
            hit = _batch_is_target(trials)
            bisecting = []
            for t, i in enumerate(active):
                if hit[t]:
                    cands[i] = trials[t]
                elif not nominal_mask[feat[i]]:
                    bisecting.append(i)
                # nominal miss: keep the candidate's category
            if not bisecting:
                continue
            lo_lam = {i: 0.0 for i in bisecting}  # 0 = original value
            hi_lam = {i: 1.0 for i in bisecting}  # 1 = candidate value
            for _ in range(BISECTION_STEPS):
                trials = cands[bisecting].copy()
                for t, i in enumerate(bisecting):
                    j = feat[i]
                    mid = (lo_lam[i] + hi_lam[i]) / 2
                    trials[t, j] = row[j] + mid * (cands[i, j] - row[j])
                hit = _batch_is_target(trials)
                for t, i in enumerate(bisecting):
                    mid = (lo_lam[i] + hi_lam[i]) / 2
                    if hit[t]:
                        hi_lam[i] = mid
                    else:
                        lo_lam[i] = mid
            for i in bisecting:
                j = feat[i]
                cands[i, j] = row[j] + hi_lam[i] * (cands[i, j] - row[j])
        return cands

    candidates = np.tile(row, (budget, 1))
    for i in range(budget):
        n_mutate = int(rng.integers(1, len(mutable) + 1))
        chosen = rng.choice(mutable, size=n_mutate, replace=False)
        for j in chosen:
            if nominal_mask[j]:
                n_cats = categories.get(j, 2) if categories else 2
                candidates[i, j] = float(rng.integers(n_cats))
            else:
                candidates[i, j] = rng.uniform(lo[j], hi[j])
    probas = predictor.predict_proba(candidates)
    classes = np.argmax(probas, axis=1)

    hits = np.flatnonzero(classes == target_class)
    for i in np.flatnonzero(classes != target_class):
        cand = candidates[i]
        score = _objective(row, cand, scales, nominal_mask) - float(probas[i, target_class])
        if best_invalid is None or score < best_invalid[0]:
            best_invalid = (score, cand.copy())

    # refine only the most promising hits; each bisection probe costs a
    # full model evaluation
    hits = sorted(hits, key=lambda i: _objective(row, candidates[i], scales, nominal_mask))
    hits = hits[: max(4 * k, 20)]
    refined = refine_batch(candidates[hits]) if hits else np.empty((0, d))
    for cand in refined:
        c, p_target = classify(cand)
        if c != target_class:
            continue
        key = tuple(np.round(cand, 10))
        dist = _distance(row, cand, scales, nominal_mask)
        existing = valid.get(key)
        if existing is None or dist < existing.distance:
            valid[key] = Counterfactual(
                row=cand,
                predicted_class=c,
                probability=p_target,
                distance=dist,
                changed=_changed_mask(row, cand),
            )

    if not valid:
        raise CounterfactualError(
            "no valid counterfactual within budget",
            best_attempt=None if best_invalid is None else best_invalid[1],
        )
    ranked = sorted(
        valid.values(),
        key=lambda c: (c.distance + SPARSITY_PENALTY * int(c.changed.sum())),
    )
    return CounterfactualSet(
        original=row,
        original_class=original_class,
        original_probability=float(proba[original_class]),
        target_class=target_class,
        counterfactuals=ranked[:k],
        feature_names=feature_names,
    )


def cem_explain(
    predictor,
    row: np.ndarray,
    mode: str,
    background: np.ndarray,
    budget: int = MIN_BUDGET,
    seed: int = 0,
    nominal_mask: np.ndarray | None = None,
    categories: dict[int, int] | None = None,
    max_exhaustive_features: int = 10,
) -> CEMResult:
    """Contrastive explanations.

    pertinent_negative: the sparsest counterfactual re-expressed as a
    delta from the original row.
    pertinent_positive: the smallest feature subset whose retention (all
    other features replaced by background medians) preserves the
    predicted class; exhaustive over subsets for d <= 10.
    """
    row = np.asarray(row, dtype=np.float64)
    background = np.atleast_2d(np.asarray(background, dtype=np.float64))
    if background.shape[0] == 0:
        raise CounterfactualError("background must be non-empty")
    if mode not in ("pertinent_negative", "pertinent_positive"):
        raise CounterfactualError(f"unknown CEM mode {mode!r}")
    d = len(row)
    proba = predictor.predict_proba(row[None, :])[0]
    original_class = int(np.argmax(proba))

    if mode == "pertinent_negative":
        target = 1 - original_class
        cs = counterfactual_search(
            predictor,
            row,
            target,
            background,
            k=DEFAULT_K,
            budget=budget,
            seed=seed,
            nominal_mask=nominal_mask,
            categories=categories,
        )
        best = min(
            cs.counterfactuals,
            key=lambda c: (int(c.changed.sum()), c.distance),
        )
        return CEMResult(
            mode=mode,
            delta=best.row - row,
            retained=None,
            masked_row=None,
            sparsity=int(best.changed.sum()),
            achieved_class=best.predicted_class,
            probability=best.probability,
        )

    if d > max_exhaustive_features:
        raise CounterfactualError(
            f"pertinent_positive subset enumeration limited to {max_exhaustive_features} features"
        )
    medians = np.median(background, axis=0)

    def masked(keep_mask: int) -> np.ndarray:
        out = medians.copy()
        for j in range(d):
            if keep_mask >> j & 1:
                out[j] = row[j]
        return out

    subsets = sorted(range(2**d), key=lambda m: (bin(m).count("1"), m))
    for mask in subsets:
        if mask == (1 << d) - 1:
            continue
        cand = masked(mask)
        p = predictor.predict_proba(cand[None, :])[0]
        if int(np.argmax(p)) == original_class:
            retained = np.array([(mask >> j & 1) == 1 for j in range(d)])
            return CEMResult(
                mode=mode,
                delta=None,
                retained=retained,
                masked_row=cand,
                sparsity=int(retained.sum()),
                achieved_class=original_class,
                probability=float(p[original_class]),
            )
    return CEMResult(
        mode=mode,
        delta=None,
        retained=np.ones(d, dtype=bool),
        masked_row=row.copy(),
        sparsity=d,
        achieved_class=original_class,
        probability=float(proba[original_class]),
        flagged=True,
    )
