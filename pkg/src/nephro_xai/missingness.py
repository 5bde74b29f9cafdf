"""Missingness profiling and Little's MCAR hypothesis test.

The test groups rows by their observed-variable pattern, estimates the
grand mean and covariance of the (numerically encoded) features by EM,
and compares pattern-wise means against the EM estimates with a
chi-square statistic.  A small p-value rejects the MCAR hypothesis.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats

from nephro_xai.tabular import DataTable

EM_MAX_ITER = 100
EM_TOL = 1e-6
RIDGE = 1e-6


class MCARTestError(ValueError):
    """The test is undefined for the given data."""


@dataclass(frozen=True)
class MissingnessProfile:
    features: list[str]
    counts: dict[str, int]
    fractions: dict[str, float]
    n_rows: int

    def render(self) -> str:
        width = max(len(f) for f in self.features)
        lines = [f"{'Feature':<{width}}  Missing  Percent"]
        for f in self.features:
            lines.append(f"{f:<{width}}  {self.counts[f]:>7d}  {100 * self.fractions[f]:>6.2f}")
        return "\n".join(lines)


@dataclass(frozen=True)
class MissingPattern:
    observed: tuple[bool, ...]
    rows: np.ndarray


@dataclass(frozen=True)
class MCARTestResult:
    statistic: float
    degrees_of_freedom: int
    p_value: float
    n_patterns: int
    sample_size: int
    notes: tuple[str, ...] = ()


def profile_missingness(table: DataTable) -> MissingnessProfile:
    """Per-feature missing counts and fractions (target column excluded)."""
    features = table.feature_names
    counts = {f: int(table.missing_mask(f).sum()) for f in features}
    n = table.n_rows
    fractions = {f: counts[f] / n for f in features}
    return MissingnessProfile(features=features, counts=counts, fractions=fractions, n_rows=n)


def numeric_view(table: DataTable) -> tuple[np.ndarray, list[str]]:
    """Features as a float matrix with nan for MISSING; nominal columns use
    their ordinal category codes."""
    cols, names = [], []
    for spec in table.schema:
        if spec.name == table.target:
            continue
        col = table.columns[spec.name].astype(np.float64)
        if spec.kind == "nominal":
            col = np.where(table.columns[spec.name] < 0, np.nan, col)
        cols.append(col)
        names.append(spec.name)
    return np.column_stack(cols), names


def missing_patterns(Y: np.ndarray) -> list[MissingPattern]:
    """Group row indices by observed-variable mask; patterns partition rows."""
    observed = ~np.isnan(Y)
    patterns: dict[tuple[bool, ...], list[int]] = {}
    for i, mask in enumerate(observed):
        patterns.setdefault(tuple(mask.tolist()), []).append(i)
    return [
        MissingPattern(observed=m, rows=np.array(rows, dtype=np.int64))
        for m, rows in patterns.items()
    ]


def em_mean_cov(
    Y: np.ndarray,
    max_iter: int = EM_MAX_ITER,
    tol: float = EM_TOL,
) -> tuple[np.ndarray, np.ndarray]:
    """EM estimates of the mean and covariance of a multivariate normal
    with values missing at random.

    Missing sub-vectors are replaced by their conditional expectations
    given the observed part; the M-step covariance adds the conditional
    covariance of the imputed block.
    """
    n, p = Y.shape
    mu = np.nanmean(Y, axis=0)
    mu = np.where(np.isnan(mu), 0.0, mu)
    filled = np.where(np.isnan(Y), mu, Y)
    sigma = np.cov(filled, rowvar=False, bias=True)
    sigma = np.atleast_2d(sigma)

    patterns = missing_patterns(Y)
    for _ in range(max_iter):
        expected = np.array(filled)
        corr = np.zeros((p, p))
        sigma_r = _regularize(sigma)
        for pat in patterns:
            obs = np.array(pat.observed)
            mis = ~obs
            if not mis.any():
                expected[pat.rows] = Y[pat.rows]
                continue
            if not obs.any():
                expected[pat.rows] = mu
                corr[np.ix_(mis, mis)] += len(pat.rows) * sigma_r[np.ix_(mis, mis)]
                continue
            soo = sigma_r[np.ix_(obs, obs)]
            smo = sigma_r[np.ix_(mis, obs)]
            smm = sigma_r[np.ix_(mis, mis)]
            beta = np.linalg.solve(soo, smo.T).T  # (n_mis, n_obs)
            resid = Y[pat.rows][:, obs] - mu[obs]
            cond_mean = mu[mis] + resid @ beta.T
            block = np.array(Y[pat.rows])
            block[:, mis] = cond_mean
            expected[pat.rows] = block
            cond_cov = smm - beta @ smo.T
            corr[np.ix_(mis, mis)] += len(pat.rows) * cond_cov

        new_mu = expected.mean(axis=0)
        centered = expected - new_mu
        new_sigma = (centered.T @ centered + corr) / n
        delta = max(
            np.max(np.abs(new_mu - mu)),
            np.max(np.abs(new_sigma - sigma)),
        )
        mu, sigma, filled = new_mu, new_sigma, expected
        if delta < tol:
            break
    return mu, sigma


def _regularize(sigma: np.ndarray) -> np.ndarray:
    p = sigma.shape[0]
    return sigma + np.eye(p) * (RIDGE * np.trace(sigma) / p)


def little_mcar_test(
    table: DataTable,
    sample_fraction: float = 1.0,
    seed: int = 0,
) -> MCARTestResult:
    """Little's chi-square test of the MCAR hypothesis.

    d^2 = sum_j n_j (ybar_j - mu_j)' Sigma_j^{-1} (ybar_j - mu_j) over the
    observed sub-vectors of each missingness pattern, with (mu, Sigma)
    estimated by EM; df = (sum_j p_j) - p.
    """
    if not 0 < sample_fraction <= 1:
        raise MCARTestError("sample_fraction must be in (0, 1]")
    Y, _ = numeric_view(table)
    n = Y.shape[0]
    notes: list[str] = []
    if sample_fraction < 1.0:
        rng = np.random.default_rng(seed)
        size = max(2, int(round(sample_fraction * n)))
        Y = Y[rng.choice(n, size=size, replace=False)]

    all_missing = np.isnan(Y).all(axis=1)
    if all_missing.any():
        warnings.warn(f"dropping {int(all_missing.sum())} rows missing every variable")
        notes.append(f"dropped {int(all_missing.sum())} fully-missing rows")
        Y = Y[~all_missing]

    patterns = missing_patterns(Y)
    if len(patterns) < 2:
        raise MCARTestError("fewer than 2 missingness patterns; test undefined")

    mu, sigma = em_mean_cov(Y)
    sigma_r = _regularize(sigma)
    p = Y.shape[1]

    d2 = 0.0
    sum_pj = 0
    for pat in patterns:
        obs = np.array(pat.observed)
        pj = int(obs.sum())
        if pj == 0:
            continue
        sum_pj += pj
        ybar = Y[pat.rows][:, obs].mean(axis=0)
        diff = ybar - mu[obs]
        sub = sigma_r[np.ix_(obs, obs)]
        try:
            solved = np.linalg.solve(sub, diff)
        except np.linalg.LinAlgError:
            raise MCARTestError(
                "singular pattern covariance after regularization"
            ) from None
        d2 += len(pat.rows) * float(diff @ solved)

    df = sum_pj - p
    p_value = float(stats.chi2.sf(d2, df)) if df > 0 else 1.0
    notes.append(
        "interpretation: a small p-value rejects the MCAR hypothesis "
        "(standard convention)"
    )
    return MCARTestResult(
        statistic=float(d2),
        degrees_of_freedom=int(df),
        p_value=p_value,
        n_patterns=len(patterns),
        sample_size=Y.shape[0],
        notes=tuple(notes),
    )
