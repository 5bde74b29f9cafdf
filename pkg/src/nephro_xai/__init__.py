"""Interpretable machine-learning toolkit for tabular clinical prediction.

The package covers the full workflow for a chronic kidney disease (CKD)
cohort: missing-data diagnosis (Little's MCAR test), learned regression
imputation, multi-method feature selection, from-scratch ensemble
classifiers, feature- and example-based explanations, and an
interpretability/fidelity scoring layer.  A CLI (``nephro-xai``) and an
HTTP service expose the same functionality for batch runs and for the
clinician-facing what-if UI.
"""

from nephro_xai.tabular import (
    MISSING,
    FIT,
    ColumnSpec,
    DataTable,
    StandardizationParams,
    parse_dataset,
    serialize_dataset,
    standardize,
    encode_for_model,
)

__version__ = "0.1.0"

__all__ = [
    "MISSING",
    "FIT",
    "ColumnSpec",
    "DataTable",
    "StandardizationParams",
    "parse_dataset",
    "serialize_dataset",
    "standardize",
    "encode_for_model",
]
