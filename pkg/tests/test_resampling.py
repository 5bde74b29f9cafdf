import numpy as np
import pytest

from nephro_xai.resampling import (
    ResamplingError,
    evaluate_cv,
    smote_balance,
    stratified_kfold,
)


def _imbalanced(seed=0, n_major=250, n_minor=150, d=4):
    rng = np.random.default_rng(seed)
    X0 = rng.normal(0.0, 1.0, size=(n_major, d))
    X1 = rng.normal(2.5, 1.0, size=(n_minor, d))
    return np.vstack([X0, X1]), np.array([0] * n_major + [1] * n_minor)


def test_smote_balances_250_150_to_250_250():
    X, y = _imbalanced()
    Xb, yb = smote_balance(X, y, seed=0)
    assert np.bincount(yb).tolist() == [250, 250]
    assert len(Xb) == 500


def test_smote_keeps_originals_bit_exact():
    X, y = _imbalanced()
    Xb, yb = smote_balance(X, y, seed=0)
    np.testing.assert_array_equal(Xb[: len(X)], X)
    np.testing.assert_array_equal(yb[: len(y)], y)


def test_smote_segment_membership():
    """Each synthetic numeric point lies on a segment between two minority
    rows (seed and one of its 5 nearest neighbors in standardized space)."""
    X, y = _imbalanced()
    Xb, yb = smote_balance(X, y, seed=0)
    minority = X[y == 1]
    synthetic = Xb[len(X):]
    assert np.all(yb[len(X):] == 1)
    mu, sd = X.mean(0), X.std(0)
    Z = (minority - mu) / sd
    for s in synthetic:
        # find a pair (a, b) of minority rows with s = a + lam*(b - a)
        found = False
        for i, a in enumerate(minority):
            diff = s - a
            span = minority - a
            with np.errstate(divide="ignore", invalid="ignore"):
                lam = np.where(span != 0, diff / span, np.nan)
            for j in range(len(minority)):
                if i == j:
                    continue
                lams = lam[j][~np.isnan(lam[j])]
                if len(lams) == 0:
                    continue
                l0 = lams[0]
                if 0 <= l0 <= 1 and np.allclose(s, a + l0 * (minority[j] - a), atol=1e-8):
                    # one endpoint is the seed, the other one of its 5
                    # nearest neighbors (the representation is symmetric)
                    di = np.argsort(np.sum((Z - Z[i]) ** 2, axis=1))
                    dj = np.argsort(np.sum((Z - Z[j]) ** 2, axis=1))
                    if j in di[1:6] or i in dj[1:6]:
                        found = True
                        break
            if found:
                break
        assert found


def test_smote_nominal_cells_copy_seed_row():
    X, y = _imbalanced(d=3)
    X = np.column_stack([X, np.tile([0.0, 1.0], len(X) // 2)])
    nominal_mask = np.array([False, False, False, True])
    Xb, yb = smote_balance(X, y, nominal_mask=nominal_mask, seed=0)
    assert set(np.unique(Xb[:, 3])) <= {0.0, 1.0}


def test_smote_deterministic():
    X, y = _imbalanced()
    a = smote_balance(X, y, seed=42)
    b = smote_balance(X, y, seed=42)
    np.testing.assert_array_equal(a[0], b[0])


def test_smote_balanced_input_is_identity():
    X, y = _imbalanced(n_major=100, n_minor=100)
    Xb, yb = smote_balance(X, y, seed=0)
    np.testing.assert_array_equal(Xb, X)


def test_stratified_folds_of_50_at_25_25():
    X, y = _imbalanced()
    Xb, yb = smote_balance(X, y, seed=0)
    folds = stratified_kfold(yb, 10, seed=0)
    for f in range(10):
        test = folds.test_rows(f)
        assert len(test) == 50
        assert np.bincount(yb[test]).tolist() == [25, 25]
    all_rows = np.concatenate([folds.test_rows(f) for f in range(10)])
    assert sorted(all_rows.tolist()) == list(range(500))


def test_stratified_kfold_deterministic():
    y = np.array([0, 1] * 50)
    a = stratified_kfold(y, 5, seed=9)
    b = stratified_kfold(y, 5, seed=9)
    np.testing.assert_array_equal(a.fold_of, b.fold_of)


def test_kfold_rejects_small_class():
    y = np.array([0] * 30 + [1] * 3)
    with pytest.raises(ResamplingError):
        stratified_kfold(y, 10, seed=0)


def test_evaluate_cv_confusion_orientation():
    # class 0 is the positive class; confusion rows actual, cols predicted
    X, y = _imbalanced(n_major=100, n_minor=100)
    from nephro_xai.models import ModelSpec

    folds = stratified_kfold(y, 5, seed=0)
    report = evaluate_cv(ModelSpec("LR", {}, seed=0), X, y, folds)
    cm = report.confusion
    assert cm.sum() == 200
    assert cm[0].sum() == 100  # actual class-0 rows
    assert report.f1 > 0.9
