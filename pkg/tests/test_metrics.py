import numpy as np
import pytest

from nephro_xai.metrics import (
    MetricsError,
    composite_indices,
    cosine_similarity,
    external_fidelity,
    important_set,
    interpretability_report,
    interpretability_score,
    round2,
)


def test_round2_half_up():
    assert round2(0.665) == 0.67
    assert round2(0.664) == 0.66
    assert round2(0.125) == 0.13
    assert round2(2.0) == 2.0
    assert round2(0.005) == 0.01


def test_important_set_minimal_prefix():
    imp = np.array([0.5, 0.3, 0.15, 0.05])
    s = important_set(imp, ["a", "b", "c", "d"], cutoff=0.9)
    assert s.members == ["a", "b", "c"]  # 0.95 first reaches 0.9
    assert s.n_important == 3
    assert s.features == ["a", "b", "c", "d"]


def test_important_set_exact_cutoff_boundary():
    imp = np.array([0.6, 0.3, 0.1])
    s = important_set(imp, ["a", "b", "c"], cutoff=0.9)
    assert s.members == ["a", "b"]  # cumulative 0.9 counts as reached


def test_important_set_tie_breaks_by_index():
    imp = np.array([0.25, 0.25, 0.25, 0.25])
    s = important_set(imp, ["w", "x", "y", "z"], cutoff=0.5)
    assert s.members == ["w", "x"]


def test_important_set_normalizes_unscaled_input():
    s = important_set(np.array([5.0, 3.0, 2.0]), ["a", "b", "c"], cutoff=0.8)
    assert s.members == ["a", "b"]
    assert abs(s.importances.sum() - 1.0) < 1e-12


def test_important_set_validation():
    with pytest.raises(MetricsError):
        important_set(np.array([0.5, -0.1]), ["a", "b"])
    with pytest.raises(MetricsError):
        important_set(np.zeros(3), ["a", "b", "c"])


def test_external_fidelity_reference_values():
    # |true|=4, |explanation|=2, overlap 2: P=0.50, R=1.00, F1=0.67
    p, r, f1 = external_fidelity({"a", "b", "c", "d"}, {"a", "b"})
    assert round2(p) == 0.50
    assert round2(r) == 1.00
    assert round2(f1) == 0.67


def test_external_fidelity_disjoint_and_validation():
    p, r, f1 = external_fidelity({"a"}, {"b"})
    assert (p, r, f1) == (0.0, 0.0, 0.0)
    with pytest.raises(MetricsError):
        external_fidelity(set(), {"a"})
    with pytest.raises(MetricsError):
        external_fidelity({"a"}, set())


def test_interpretability_score():
    assert interpretability_score(6, 24) == 0.75
    assert interpretability_score(24, 24) == 0.0
    with pytest.raises(MetricsError):
        interpretability_score(0, 24)
    with pytest.raises(MetricsError):
        interpretability_score(25, 24)


def test_composite_indices():
    fii, facc = composite_indices(0.8, 0.75, 0.95)
    assert abs(fii - 0.6) < 1e-12
    assert abs(facc - 0.76) < 1e-12
    with pytest.raises(MetricsError):
        composite_indices(1.2, 0.5, 0.5)


def test_cosine_similarity():
    assert abs(cosine_similarity([1, 0], [1, 0]) - 1.0) < 1e-12
    assert abs(cosine_similarity([1, 0], [0, 1])) < 1e-12
    with pytest.raises(MetricsError):
        cosine_similarity([1, 0], [1, 0, 0])
    with pytest.raises(MetricsError):
        cosine_similarity([0, 0], [1, 0])


def test_interpretability_report_document():
    report = interpretability_report(
        model="RF",
        n_important=6,
        true_set={"a", "b", "c", "d"},
        explanation_set={"a", "b"},
        accuracy=0.95,
        d_total=24,
        cosine=0.88,
    )
    doc = report.to_document()
    assert doc["interpretability"] == 0.75
    assert doc["fidelity_precision"] == 0.50
    assert doc["fidelity_recall"] == 1.00
    assert doc["fidelity_f1"] == 0.67
    assert doc["fii"] == 0.50  # 0.6667 * 0.75
    assert doc["facc"] == 0.63  # 0.6667 * 0.95
    assert doc["cosine"] == 0.88
    assert doc["n_important"] == 6
