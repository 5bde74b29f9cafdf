import numpy as np
import pytest

from nephro_xai.models import ModelSpec, TrainingError, export_tree, grid_search, train
from nephro_xai.resampling import evaluate_cv, stratified_kfold

FAMILIES = ("LR", "NB", "LSVM", "DT", "RF", "ADA", "GBM")


def _blobs(seed=0, n=200, d=5, gap=2.0):
    rng = np.random.default_rng(seed)
    X0 = rng.normal(0.0, 1.0, size=(n // 2, d))
    X1 = rng.normal(gap, 1.0, size=(n // 2, d))
    X = np.vstack([X0, X1])
    y = np.array([0] * (n // 2) + [1] * (n // 2))
    perm = rng.permutation(n)
    return X[perm], y[perm]


@pytest.fixture(scope="module")
def blobs():
    return _blobs()


@pytest.mark.parametrize("family", FAMILIES)
def test_probabilities_and_importances(family, blobs):
    X, y = blobs
    predictor = train(ModelSpec(family, {}, seed=0), X, y)
    proba = predictor.predict_proba(X)
    np.testing.assert_allclose(proba.sum(axis=1), 1.0, atol=1e-9)
    assert proba.min() >= 0.0
    imp = predictor.feature_importances()
    assert len(imp) == X.shape[1]
    assert imp.min() >= 0.0
    assert abs(imp.sum() - 1.0) < 1e-9


@pytest.mark.parametrize("family", FAMILIES)
def test_deterministic_given_seed(family, blobs):
    X, y = blobs
    p1 = train(ModelSpec(family, {}, seed=3), X, y)
    p2 = train(ModelSpec(family, {}, seed=3), X, y)
    np.testing.assert_array_equal(p1.predict_proba(X), p2.predict_proba(X))


@pytest.mark.parametrize("family", FAMILIES)
def test_separable_accuracy(family, blobs):
    X, y = blobs
    predictor = train(ModelSpec(family, {}, seed=0), X, y)
    acc = (predictor.predict(X) == y).mean()
    assert acc >= 0.95


def test_irrelevant_feature_gets_low_importance():
    rng = np.random.default_rng(5)
    X = np.column_stack([rng.normal(size=400), rng.normal(size=400)])
    y = (X[:, 0] > 0).astype(int)
    predictor = train(ModelSpec("RF", {}, seed=0), X, y)
    imp = predictor.feature_importances()
    assert imp[0] > 0.9


def test_model_spec_validation():
    with pytest.raises(ValueError):
        ModelSpec("XGB", {}, seed=0)
    with pytest.raises(ValueError):
        ModelSpec("RF", {"n_estimators": 0}, seed=0)
    with pytest.raises(ValueError):
        ModelSpec("GBM", {"learning_rate": 1.5}, seed=0)


def test_tree_export_structure(blobs):
    X, y = blobs
    predictor = train(ModelSpec("DT", {"max_depth": 3}, seed=0), X, y)
    root = export_tree(predictor)
    assert root.sample_fraction == 1.0
    doc = root.to_document(["a", "b", "c", "d", "e"])
    assert doc["feature"] in list("abcde")

    def check(node):
        if "left" not in node:
            assert "right" not in node
            return
        assert sum(node["class_counts"]) == sum(node["left"]["class_counts"]) + sum(
            node["right"]["class_counts"]
        )
        check(node["left"])
        check(node["right"])

    check(doc)


def test_tree_tie_break_lowest_feature_index():
    # duplicated feature: identical splits, lowest index must win
    X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 0.0], [1.0, 1.0]])
    y = np.array([0, 1, 0, 1])
    predictor = train(ModelSpec("DT", {}, seed=0), X, y)
    assert export_tree(predictor).feature == 0


def test_grid_search_prefers_better_cell(blobs):
    X, y = blobs
    folds = stratified_kfold(y, 5, seed=0)
    spec, score = grid_search(
        "DT", {"max_depth": [1, 8]}, X, y, folds, seed=0
    )
    assert score > 0.9
    assert spec.params["max_depth"] in (1, 8)


def test_grid_search_empty_lattice(blobs):
    X, y = blobs
    folds = stratified_kfold(y, 5, seed=0)
    with pytest.raises(TrainingError):
        grid_search("DT", [], X, y, folds, seed=0)


def test_evaluate_cv_report(blobs):
    X, y = blobs
    folds = stratified_kfold(y, 5, seed=0)
    report = evaluate_cv(ModelSpec("LR", {}, seed=0), X, y, folds)
    assert report.confusion.sum() == len(y)
    assert len(report.per_fold) == 5
    assert 0 <= report.best_fold < 5
    assert report.accuracy >= 0.95
