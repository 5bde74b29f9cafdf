import io

import numpy as np
import pytest

from nephro_xai import pipeline
from nephro_xai.data import TARGET_COLUMN, load_ckd_schema
from nephro_xai.data.generate import load_surrogate
from nephro_xai.imputation import apply_imputation, fit_imputation_plan
from nephro_xai.tabular import ColumnSpec, parse_dataset


@pytest.fixture(scope="session")
def surrogate_table():
    return load_surrogate()


@pytest.fixture(scope="session")
def imputed_table(surrogate_table):
    plan = fit_imputation_plan(surrogate_table)
    return apply_imputation(surrogate_table, plan).table


@pytest.fixture(scope="session")
def pipeline_run(tmp_path_factory):
    """One full pipeline run shared by pipeline, service and acceptance
    tests; byte-determinism is asserted separately on cheap stages."""
    out = tmp_path_factory.mktemp("pipeline")
    config = pipeline.load_config(out=str(out))
    pipeline.run_all(config)
    return config


def make_table(csv_text: str, schema, target="y"):
    return parse_dataset(io.StringIO(csv_text), schema, target)


@pytest.fixture()
def tiny_schema():
    return (
        ColumnSpec("a", "numeric"),
        ColumnSpec("b", "numeric"),
        ColumnSpec("c", "nominal", ("no", "yes")),
        ColumnSpec("y", "nominal", ("neg", "pos")),
    )


class LinearProbaModel:
    """p(class 1) = sigmoid(w.x + b); handy closed-form test predictor."""

    def __init__(self, w, b=0.0):
        self.w = np.asarray(w, dtype=np.float64)
        self.b = b

    def predict_proba(self, X):
        z = np.atleast_2d(X) @ self.w + self.b
        p1 = 1.0 / (1.0 + np.exp(-z))
        return np.column_stack([1 - p1, p1])

    def predict(self, X):
        return np.argmax(self.predict_proba(X), axis=1)


@pytest.fixture()
def linear_model():
    return LinearProbaModel
