"""Exhaustive hyperparameter grid search scored by cross-validated F1."""

from __future__ import annotations

import itertools
import logging

import numpy as np

from nephro_xai.models.base import ModelSpec, TrainingError

log = logging.getLogger(__name__)


def expand_grid(grid: dict[str, list]) -> list[dict]:
    """Cartesian product of a {param: values} lattice, in insertion order."""
    keys = list(grid)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


def grid_search(
    family: str,
    grid: dict[str, list] | list[dict],
    X: np.ndarray,
    y: np.ndarray,
    folds,
    seed: int = 0,
) -> tuple[ModelSpec, float]:
    """Evaluate every cell with evaluate_cv and return the best spec by F1
    (ties go to the first cell in lattice order).  Cells that fail to
    train are skipped with a log line; all cells failing is an error."""
    from nephro_xai.resampling import ResamplingError, evaluate_cv

    cells = expand_grid(grid) if isinstance(grid, dict) else list(grid)
    if not cells:
        raise TrainingError("empty hyperparameter lattice")
    best_spec, best_score = None, -1.0
    for cell in cells:
        spec = ModelSpec(family=family, params=cell, seed=seed)
        try:
            report = evaluate_cv(spec, X, y, folds)
        except (TrainingError, ResamplingError) as exc:
            log.warning("grid cell %s failed: %s", cell, exc)
            continue
        if report.f1 > best_score:
            best_spec, best_score = spec, report.f1
    if best_spec is None:
        raise TrainingError("every grid cell failed to train")
    return best_spec, best_score
