import io

import numpy as np
import pytest
from scipy import stats

from nephro_xai.missingness import (
    MCARTestError,
    em_mean_cov,
    little_mcar_test,
    missing_patterns,
    profile_missingness,
)
from nephro_xai.tabular import ColumnSpec, parse_dataset
from tests.conftest import make_table


def _table_from_matrix(Y):
    cols = [f"x{j}" for j in range(Y.shape[1])]
    schema = tuple(ColumnSpec(c, "numeric") for c in cols) + (
        ColumnSpec("y", "nominal", ("neg", "pos")),
    )
    lines = [",".join(cols + ["y"])]
    for i, row in enumerate(Y):
        cells = ["?" if np.isnan(v) else repr(float(v)) for v in row]
        lines.append(",".join(cells + ["neg" if i % 2 else "pos"]))
    return parse_dataset(io.StringIO("\n".join(lines) + "\n"), schema, "y")


def _mcar_matrix(rng, n=500, p=4, frac=0.1):
    Y = rng.multivariate_normal(np.zeros(p), np.eye(p) + 0.3, size=n)
    mask = rng.random(Y.shape) < frac
    mask[0] = False  # keep at least one complete row
    Y = Y.copy()
    Y[mask] = np.nan
    return Y


def test_profile_counts(tiny_schema):
    t = make_table("a,b,c,y\n1,2,no,neg\n?,3,?,pos\n2,?,no,neg\n5,6,yes,pos\n", tiny_schema)
    profile = profile_missingness(t)
    assert profile.counts == {"a": 1, "b": 1, "c": 1}
    assert profile.fractions["a"] == 0.25
    assert "Percent" in profile.render()


def test_patterns_partition_rows():
    rng = np.random.default_rng(0)
    Y = _mcar_matrix(rng, n=60)
    patterns = missing_patterns(Y)
    all_rows = np.concatenate([p.rows for p in patterns])
    assert sorted(all_rows.tolist()) == list(range(60))


def test_em_recovers_moments_on_complete_data():
    rng = np.random.default_rng(1)
    Y = rng.multivariate_normal([1.0, -2.0], [[2.0, 0.5], [0.5, 1.0]], size=4000)
    mu, sigma = em_mean_cov(Y)
    np.testing.assert_allclose(mu, Y.mean(axis=0), atol=1e-9)
    np.testing.assert_allclose(sigma, np.cov(Y.T, bias=True), atol=1e-6)


def test_statistic_location_invariance():
    rng = np.random.default_rng(2)
    Y = _mcar_matrix(rng)
    t1 = little_mcar_test(_table_from_matrix(Y), sample_fraction=1.0, seed=0)
    Y2 = Y.copy()
    Y2[:, 1] = Y2[:, 1] + 100.0
    t2 = little_mcar_test(_table_from_matrix(Y2), sample_fraction=1.0, seed=0)
    assert abs(t1.statistic - t2.statistic) < 1e-5
    assert t1.degrees_of_freedom == t2.degrees_of_freedom


def test_p_value_monotone_in_statistic():
    df = 30
    grid = np.linspace(1, 200, 40)
    p = stats.chi2.sf(grid, df)
    assert np.all(np.diff(p) < 0)


def test_fewer_than_two_patterns_errors():
    Y = np.ones((10, 3))
    with pytest.raises(MCARTestError):
        little_mcar_test(_table_from_matrix(Y), sample_fraction=1.0, seed=0)


def test_sample_fraction_subsamples_deterministically():
    rng = np.random.default_rng(3)
    Y = _mcar_matrix(rng)
    t = _table_from_matrix(Y)
    r1 = little_mcar_test(t, sample_fraction=0.5, seed=7)
    r2 = little_mcar_test(t, sample_fraction=0.5, seed=7)
    assert r1.statistic == r2.statistic
    assert r1.sample_size == 250


def test_mcar_calibration_smoke():
    # 40-trial smoke check; the full 200-trial criterion lives in the
    # acceptance suite
    rejections = 0
    for seed in range(40):
        rng = np.random.default_rng(1000 + seed)
        Y = _mcar_matrix(rng)
        result = little_mcar_test(_table_from_matrix(Y), sample_fraction=1.0, seed=seed)
        rejections += result.p_value < 0.05
    assert rejections / 40 <= 0.15


def test_mar_detection():
    hits = 0
    for seed in range(20):
        rng = np.random.default_rng(2000 + seed)
        Y = rng.multivariate_normal(np.zeros(3), np.eye(3) + 0.3, size=500)
        Y = Y.copy()
        Y[Y[:, 0] > 0.3, 1] = np.nan  # missingness in col 1 driven by col 0
        result = little_mcar_test(_table_from_matrix(Y), sample_fraction=1.0, seed=seed)
        hits += result.p_value < 0.005
    assert hits / 20 >= 0.8
