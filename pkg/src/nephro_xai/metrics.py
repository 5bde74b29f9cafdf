"""Interpretability and fidelity scoring.

Interpretability I = (total features - important features) / total,
taken literally from the source convention: more redundant features
means a higher score.  External fidelity compares the ensemble's
important-feature set against a white-box surrogate tree's set through
precision/recall/F1; FII = F1 x I and FAcc = F1 x accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

DEFAULT_CUTOFF = 0.90
#: the paper-scale default feature total is the pre-selection count (24)
DEFAULT_TOTAL_FEATURES = 24


class MetricsError(ValueError):
    pass


def round2(x: float) -> float:
    """Round half-up to 2 decimals for display."""
    return float(Decimal(repr(x)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class ImportantFeatureSet:
    features: list[str]  # all features, sorted by descending importance
    importances: np.ndarray  # normalized, same order as `features`
    cutoff: float
    members: list[str]  # minimal prefix reaching the cutoff

    @property
    def n_important(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class InterpretabilityReport:
    model: str
    interpretability: float
    precision: float
    recall: float
    f1: float
    cosine: float | None
    fii: float
    facc: float
    d_total: int
    n_important: int

    def to_document(self) -> dict:
        return {
            "model": self.model,
            "interpretability": round2(self.interpretability),
            "fidelity_precision": round2(self.precision),
            "fidelity_recall": round2(self.recall),
            "fidelity_f1": round2(self.f1),
            "cosine": None if self.cosine is None else round2(self.cosine),
            "fii": round2(self.fii),
            "facc": round2(self.facc),
            "d_total": self.d_total,
            "n_important": self.n_important,
        }


def important_set(
    importances: np.ndarray,
    feature_names: list[str],
    cutoff: float = DEFAULT_CUTOFF,
) -> ImportantFeatureSet:
    """Minimal prefix of descending normalized importances whose cumulative
    sum first reaches the cutoff.  Ties break by feature index."""
    importances = np.asarray(importances, dtype=np.float64)
    if np.any(importances < 0):
        raise MetricsError("importances must be non-negative")
    total = importances.sum()
    if total == 0:
        raise MetricsError("importances are all zero")
    norm = importances / total
    order = np.lexsort((np.arange(len(norm)), -norm))
    cumulative = np.cumsum(norm[order])
    n = int(np.searchsorted(cumulative, cutoff - 1e-12) + 1)
    sorted_names = [feature_names[i] for i in order]
    return ImportantFeatureSet(
        features=sorted_names,
        importances=norm[order],
        cutoff=cutoff,
        members=sorted_names[:n],
    )


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise MetricsError("vectors must have equal length")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise MetricsError("cosine similarity undefined for a zero vector")
    return float(u @ v / (nu * nv))


def interpretability_score(n_important: int, d_total: int) -> float:
    if not 0 < n_important <= d_total:
        raise MetricsError(f"need 0 < n_important <= d_total, got {n_important}/{d_total}")
    return (d_total - n_important) / d_total


def external_fidelity(true_set: set[str], explanation_set: set[str]) -> tuple[float, float, float]:
    """P = |intersection| / |true set|, R = |intersection| / |explanation
    set|, F1 their harmonic mean (0 when both are 0)."""
    if not true_set or not explanation_set:
        raise MetricsError("feature sets must be non-empty")
    inter = len(set(true_set) & set(explanation_set))
    p = inter / len(true_set)
    r = inter / len(explanation_set)
    f1 = 0.0 if p + r == 0 else 2 * p * r / (p + r)
    return p, r, f1


def composite_indices(f1: float, interpretability: float, accuracy: float) -> tuple[float, float]:
    for v in (f1, interpretability, accuracy):
        if not 0 <= v <= 1:
            raise MetricsError("inputs must be in [0, 1]")
    return f1 * interpretability, f1 * accuracy


def interpretability_report(
    model: str,
    n_important: int,
    true_set: set[str],
    explanation_set: set[str],
    accuracy: float,
    d_total: int = DEFAULT_TOTAL_FEATURES,
    cosine: float | None = None,
) -> InterpretabilityReport:
    interp = interpretability_score(n_important, d_total)
    p, r, f1 = external_fidelity(true_set, explanation_set)
    fii, facc = composite_indices(f1, interp, accuracy)
    return InterpretabilityReport(
        model=model,
        interpretability=interp,
        precision=p,
        recall=r,
        f1=f1,
        cosine=cosine,
        fii=fii,
        facc=facc,
        d_total=d_total,
        n_important=n_important,
    )
