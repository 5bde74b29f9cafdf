"""Batch pipeline orchestration.

Runs the stages (missingness profile, MCAR test, imputation, feature
selection, model training, explanation, counterfactuals, scorecard) and
writes each stage's report as a deterministic JSON or CSV artifact.
Reports never embed timestamps, so identical config + seed reproduces
byte-identical output.
"""

from __future__ import annotations

import configparser
import hashlib
import io
import json
import os
import warnings
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from nephro_xai import attribution, counterfactual as cfx, metrics as mtr, selection as sel
from nephro_xai.data import TARGET_COLUMN, load_ckd_schema, surrogate_csv_text
from nephro_xai.imputation import apply_imputation, fit_imputation_plan
from nephro_xai.missingness import little_mcar_test, profile_missingness
from nephro_xai.models import ModelSpec, export_tree, grid_search, train
from nephro_xai.resampling import evaluate_cv, smote_balance, stratified_kfold
from nephro_xai.tabular import (
    FIT,
    DataTable,
    EncodedMatrix,
    encode_for_model,
    parse_dataset,
    serialize_dataset,
    standardize,
)

SCHEMA_VERSION = 1

#: the canonical report set emitted by `all` (model.json is a model
#: artifact, not a report, and is excluded on purpose)
REPORT_ARTIFACTS = (
    "profile.json",
    "mcar.json",
    "imputed.csv",
    "imputation_plan.json",
    "selection.json",
    "evaluation.json",
    "explanations.json",
    "counterfactuals.json",
    "metrics.json",
)

MODEL_ARTIFACT = "model.json"

DEFAULT_FINAL_FEATURES = ("hemo", "sc", "al", "htn", "age", "dm")
DEFAULT_FAMILIES = ("LR", "NB", "LSVM", "DT", "RF", "ADA", "GBM")

SEED_ENV_VAR = "NEPHRO_XAI_SEED"


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass(frozen=True)
class PipelineConfig:
    dataset: str | None = None  # None = bundled surrogate CSV
    schema: str | None = None  # None = bundled CKD schema
    out: str = "out"
    seed: int = 0
    k: int = 10
    model: str = "RF"
    families: tuple[str, ...] = DEFAULT_FAMILIES
    grids: dict = field(default_factory=dict)  # family -> {param: [values]}
    exclusions: tuple[str, ...] = sel.DEFAULT_EXCLUSIONS
    final_features: tuple[str, ...] = DEFAULT_FINAL_FEATURES  # ("auto",) = use selection output
    immutables: tuple[str, ...] = cfx.DEFAULT_IMMUTABLES
    smote_neighbors: int = 5
    background_size: int = 100
    lime_samples: int = 1000
    permutations: int = 256
    pdp_features: tuple[str, ...] = ("hemo", "sc")
    ale_features: tuple[str, ...] = ("hemo",)
    row: int = 0
    cf_k: int = 5
    cf_budget: int = 1000
    plots: bool = True
    host: str = "127.0.0.1"
    port: int = 8000
    cors_origins: tuple[str, ...] = ()

    @property
    def out_dir(self) -> Path:
        return Path(self.out)


_TUPLE_FIELDS = {
    "families", "exclusions", "final_features", "immutables",
    "pdp_features", "ale_features", "cors_origins",
}
_INT_FIELDS = {
    "seed", "k", "smote_neighbors", "background_size", "lime_samples",
    "permutations", "row", "cf_k", "cf_budget", "port",
}
_BOOL_FIELDS = {"plots"}


def load_config(path: str | None = None, **overrides) -> PipelineConfig:
    """Read the INI config (flat key-value pairs under typed sections; any
    section name is accepted) and apply keyword overrides on top.  The
    NEPHRO_XAI_SEED environment variable wins over both."""
    values: dict = {}
    if path is not None:
        if not Path(path).is_file():
            raise ConfigError(f"config file not found: {path}")
        parser = configparser.ConfigParser()
        try:
            parser.read(path)
        except configparser.Error as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        for section in parser.sections():
            for key, raw in parser[section].items():
                values[key] = raw
    values.update({k: v for k, v in overrides.items() if v is not None})

    known = {f.name for f in fields(PipelineConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    converted = {}
    for key, raw in values.items():
        try:
            if key in _TUPLE_FIELDS and isinstance(raw, str):
                converted[key] = tuple(t.strip() for t in raw.split(",") if t.strip())
            elif key in _INT_FIELDS and isinstance(raw, str):
                converted[key] = int(raw)
            elif key in _BOOL_FIELDS and isinstance(raw, str):
                converted[key] = raw.strip().lower() in ("1", "true", "yes", "on")
            elif key == "grids" and isinstance(raw, str):
                converted[key] = json.loads(raw)
            else:
                converted[key] = raw
        except (ValueError, json.JSONDecodeError) as exc:
            raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc

    cfg = PipelineConfig(**converted)
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        try:
            cfg = replace(cfg, seed=int(env_seed))
        except ValueError as exc:
            raise ConfigError(f"bad {SEED_ENV_VAR}: {env_seed!r}") from exc
    if cfg.model not in cfg.families:
        raise ConfigError(f"model {cfg.model!r} not among families {cfg.families}")
    if cfg.k < 2:
        raise ConfigError("k must be >= 2")
    return cfg


# ---------------------------------------------------------------------------
# artifact plumbing


def write_json(path: Path, doc: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def read_json(path: Path) -> dict:
    return json.loads(path.read_text())


def load_table(config: PipelineConfig) -> DataTable:
    schema = load_ckd_schema() if config.schema is None else _read_schema(config.schema)
    if config.dataset is None:
        text = surrogate_csv_text()
    else:
        p = Path(config.dataset)
        if not p.is_file():
            raise FileNotFoundError(f"dataset not found: {config.dataset}")
        text = p.read_text()
    return parse_dataset(io.StringIO(text), schema, TARGET_COLUMN)


def _read_schema(path: str):
    from nephro_xai.tabular import ColumnSpec

    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"schema not found: {path}")
    doc = json.loads(p.read_text())
    return tuple(
        ColumnSpec(c["name"], c["kind"], tuple(c.get("categories", ()))) for c in doc["columns"]
    )


def _require(path: Path, stage: str, hint: str) -> Path:
    if not path.is_file():
        raise StageError(stage, f"{hint} required first (missing {path.name})")
    return path


def _load_imputed(config: PipelineConfig, stage: str) -> DataTable:
    path = _require(config.out_dir / "imputed.csv", stage, "impute")
    schema = load_ckd_schema() if config.schema is None else _read_schema(config.schema)
    return parse_dataset(io.StringIO(path.read_text()), schema, TARGET_COLUMN)


# ---------------------------------------------------------------------------
# tiny SVG plot emitter (headless line/bar charts; rendering proper lives
# in the UI)

_SVG_W, _SVG_H, _SVG_PAD = 480, 280, 40


def _svg_header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" height="{_SVG_H}">',
        f'<text x="{_SVG_W / 2}" y="18" text-anchor="middle" font-size="13">{title}</text>',
        f'<rect x="{_SVG_PAD}" y="{_SVG_PAD}" width="{_SVG_W - 2 * _SVG_PAD}" '
        f'height="{_SVG_H - 2 * _SVG_PAD}" fill="none" stroke="#999"/>',
    ]


def _scale(v: np.ndarray, lo: float, hi: float, a: float, b: float) -> np.ndarray:
    span = hi - lo if hi > lo else 1.0
    return a + (np.asarray(v, dtype=np.float64) - lo) / span * (b - a)


def svg_line_chart(x: np.ndarray, y: np.ndarray, title: str) -> str:
    x, y = np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)
    px = _scale(x, x.min(), x.max(), _SVG_PAD, _SVG_W - _SVG_PAD)
    py = _scale(y, y.min(), y.max(), _SVG_H - _SVG_PAD, _SVG_PAD)
    points = " ".join(f"{a:.1f},{b:.1f}" for a, b in zip(px, py))
    parts = _svg_header(title)
    parts.append(f'<polyline points="{points}" fill="none" stroke="#1f77b4" stroke-width="2"/>')
    parts.append(f'<text x="{_SVG_PAD}" y="{_SVG_H - 8}" font-size="10">{x.min():.4g}</text>')
    parts.append(
        f'<text x="{_SVG_W - _SVG_PAD}" y="{_SVG_H - 8}" text-anchor="end" font-size="10">'
        f"{x.max():.4g}</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def svg_bar_chart(labels: list[str], values: np.ndarray, title: str) -> str:
    values = np.asarray(values, dtype=np.float64)
    lo, hi = min(values.min(), 0.0), max(values.max(), 0.0)
    parts = _svg_header(title)
    width = (_SVG_W - 2 * _SVG_PAD) / max(len(values), 1)
    zero_y = float(_scale(np.array([0.0]), lo, hi, _SVG_H - _SVG_PAD, _SVG_PAD)[0])
    for i, (label, v) in enumerate(zip(labels, values)):
        y = float(_scale(np.array([v]), lo, hi, _SVG_H - _SVG_PAD, _SVG_PAD)[0])
        top, height = (y, zero_y - y) if v >= 0 else (zero_y, y - zero_y)
        color = "#2ca02c" if v >= 0 else "#d62728"
        x = _SVG_PAD + i * width
        parts.append(
            f'<rect x="{x + 2:.1f}" y="{top:.1f}" width="{width - 4:.1f}" '
            f'height="{max(height, 0.5):.1f}" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{x + width / 2:.1f}" y="{_SVG_H - 8}" text-anchor="middle" '
            f'font-size="9">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# stages


def run_profile(config: PipelineConfig) -> dict:
    table = load_table(config)
    profile = profile_missingness(table)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "n_rows": profile.n_rows,
        "features": [
            {
                "feature": f,
                "missing": profile.counts[f],
                "fraction": profile.fractions[f],
                "percent_display": mtr.round2(100 * profile.fractions[f]),
            }
            for f in profile.features
        ],
        "rendered": profile.render(),
    }
    write_json(config.out_dir / "profile.json", doc)
    return doc


def run_mcar(config: PipelineConfig, sample_fraction: float = 1.0) -> dict:
    table = load_table(config)
    result = little_mcar_test(table, sample_fraction=sample_fraction, seed=config.seed)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "statistic": result.statistic,
        "degrees_of_freedom": result.degrees_of_freedom,
        "p_value": result.p_value,
        "n_patterns": result.n_patterns,
        "sample_size": result.sample_size,
        "notes": list(result.notes),
    }
    write_json(config.out_dir / "mcar.json", doc)
    return doc


def run_impute(config: PipelineConfig) -> dict:
    table = load_table(config)
    plan = fit_imputation_plan(table)
    imputed = apply_imputation(table, plan)
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    (out / "imputed.csv").write_text(serialize_dataset(imputed.table))
    doc = {
        "schema_version": SCHEMA_VERSION,
        "plan": plan.to_document(),
        "imputed_cells": imputed.imputed_count(),
        "fallback_cells": imputed.fallback_cells,
    }
    write_json(out / "imputation_plan.json", doc)
    return doc


def _standardized_encoded(table: DataTable) -> tuple[EncodedMatrix, EncodedMatrix, dict, dict]:
    """Encoded matrices in raw and standardized space plus the fitted
    standardization parameters."""
    raw = encode_for_model(table)
    std_table, params = standardize(table, FIT)
    std = encode_for_model(std_table)
    return raw, std, params.means, params.stds


def run_select(config: PipelineConfig) -> dict:
    table = _load_imputed(config, "select")
    raw, std, _, _ = _standardized_encoded(table)

    notes: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        corr_scores = sel.correlation_with_target(std)
        logit_scores = sel.logit_significance(std)
        ig_scores = sel.information_gain_ranking(table, top_k=10)
        var_set, var_scores = sel.variance_threshold(raw)
        forward = sel.wrapper_select(std, "forward", seed=config.seed)
        rfe = sel.wrapper_select(std, "rfe", seed=config.seed)
    notes.extend(str(w.message) for w in caught)

    method_sets = {
        "correlation": {s.feature for s in corr_scores if s.selected},
        "logit": {s.feature for s in logit_scores if s.selected},
        "information_gain": {s.feature for s in ig_scores if s.selected},
        "variance": var_set,
        "forward": forward,
        "rfe": rfe,
    }
    report = sel.consensus_select(method_sets, exclusions=config.exclusions)

    def rows(scores):
        return [
            {"feature": s.feature, "score": s.score, "selected": s.selected, **s.extra}
            for s in scores
        ]

    doc = {
        "schema_version": SCHEMA_VERSION,
        "correlation": rows(corr_scores),
        "logit": rows(logit_scores),
        "information_gain": rows(ig_scores),
        "variance": rows(var_scores),
        "report": report.to_document(),
        "notes": sorted(set(notes)),
    }
    write_json(config.out_dir / "selection.json", doc)
    return doc


def _final_features(config: PipelineConfig) -> list[str]:
    if config.final_features == ("auto",):
        path = _require(config.out_dir / "selection.json", "train", "select")
        return read_json(path)["report"]["final"]
    return list(config.final_features)


def _fingerprint(features: list[dict], target: dict) -> str:
    payload = json.dumps({"features": features, "target": target}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


def run_train(config: PipelineConfig) -> dict:
    table = _load_imputed(config, "train")
    final = _final_features(config)
    raw, std, means, stds = _standardized_encoded(table)
    missing = [f for f in final if f not in std.feature_names]
    if missing:
        raise StageError("train", f"final features absent from dataset: {missing}")

    sub = std.restrict(final)
    raw_sub = raw.restrict(final)
    Xb, yb = smote_balance(
        sub.X,
        std.y,
        k_neighbors=config.smote_neighbors,
        nominal_mask=sub.nominal_mask,
        seed=config.seed,
    )
    folds = stratified_kfold(yb, config.k, seed=config.seed)

    evaluations = {}
    predictors = {}
    for family in config.families:
        grid = config.grids.get(family)
        if grid:
            spec, _ = grid_search(family, grid, Xb, yb, folds, seed=config.seed)
        else:
            spec = ModelSpec(family, {}, seed=config.seed)
        report = evaluate_cv(spec, Xb, yb, folds)
        predictor = train(spec, Xb, yb)
        predictors[family] = predictor
        evaluations[family] = {
            "spec": spec.to_document(),
            "report": report.to_document(),
            "importances": dict(zip(final, predictor.feature_importances().tolist())),
        }

    tree_doc = export_tree(predictors["DT"]).to_document(final) if "DT" in predictors else None
    chosen = config.model
    doc = {
        "schema_version": SCHEMA_VERSION,
        "final_features": final,
        "families": evaluations,
        "chosen_model": chosen,
        "tree": tree_doc,
    }
    write_json(config.out_dir / "evaluation.json", doc)

    target_spec = table.spec(TARGET_COLUMN)
    feature_docs = []
    for name in final:
        spec_col = table.spec(name)
        col = raw_sub.X[:, raw_sub.feature_index(name)]
        feature_docs.append(
            {
                "name": name,
                "kind": spec_col.kind,
                "categories": list(spec_col.categories),
                "mean": means.get(name),
                "std": stds.get(name),
                "min": float(col.min()),
                "max": float(col.max()),
            }
        )
    target_doc = {"name": TARGET_COLUMN, "categories": list(target_spec.categories)}
    chosen_eval = evaluations[chosen]
    model_doc = {
        "schema_version": SCHEMA_VERSION,
        "family": chosen,
        "params": chosen_eval["spec"]["params"],
        "seed": config.seed,
        "features": feature_docs,
        "target": target_doc,
        "fingerprint": _fingerprint(feature_docs, target_doc),
        "cv_metrics": {
            k: chosen_eval["report"][k] for k in ("precision", "recall", "f1", "accuracy")
        },
        "immutables": list(config.immutables),
        "training": {"X": Xb.tolist(), "y": yb.tolist()},
    }
    write_json(config.out_dir / MODEL_ARTIFACT, model_doc)

    if config.plots:
        cm = np.array(chosen_eval["report"]["cumulative_confusion"])
        labels = ["TP", "FN", "FP", "TN"]
        (config.out_dir / "confusion.svg").write_text(
            svg_bar_chart(labels, cm.ravel(), f"{chosen} cumulative confusion")
        )
    return doc


def load_predictor(model_doc: dict):
    """Rebuild the trained predictor deterministically from the artifact's
    embedded balanced training matrix."""
    spec = ModelSpec(model_doc["family"], dict(model_doc["params"]), seed=model_doc["seed"])
    X = np.array(model_doc["training"]["X"], dtype=np.float64)
    y = np.array(model_doc["training"]["y"], dtype=np.int64)
    return train(spec, X, y)


def _model_context(config: PipelineConfig, stage: str):
    path = _require(config.out_dir / MODEL_ARTIFACT, stage, "train")
    model_doc = read_json(path)
    predictor = load_predictor(model_doc)
    names = [f["name"] for f in model_doc["features"]]
    kinds = [f["kind"] for f in model_doc["features"]]
    X = np.array(model_doc["training"]["X"], dtype=np.float64)
    return model_doc, predictor, names, kinds, X


def run_explain(config: PipelineConfig, row: int | None = None) -> dict:
    model_doc, predictor, names, kinds, X = _model_context(config, "explain")
    row_idx = config.row if row is None else row
    if not 0 <= row_idx < len(X):
        raise StageError("explain", f"row {row_idx} out of range 0..{len(X) - 1}")
    x = X[row_idx]
    background = X[: config.background_size]
    nominal_mask = np.array([k == "nominal" for k in kinds])

    lime = attribution.lime_explain(
        predictor,
        x,
        background,
        n_samples=config.lime_samples,
        seed=config.seed,
        feature_names=names,
        nominal_mask=nominal_mask,
    )
    if len(names) <= attribution.SHAPLEY_EXACT_MAX_FEATURES:
        shap = attribution.shapley_exact(predictor, x, background, feature_names=names)
    else:
        shap = attribution.shapley_sampled(
            predictor, x, background,
            n_permutations=config.permutations, seed=config.seed, feature_names=names,
        )

    grids = []
    for fname in config.pdp_features:
        if fname not in names or kinds[names.index(fname)] == "nominal":
            continue
        grids.append(
            attribution.pdp(
                predictor, [names.index(fname)], X,
                feature_kinds=kinds, feature_names=names,
            )
        )
    ales = []
    for fname in config.ale_features:
        if fname not in names or kinds[names.index(fname)] == "nominal":
            continue
        ales.append(attribution.ale(predictor, names.index(fname), X, feature_names=names))

    doc = {
        "schema_version": SCHEMA_VERSION,
        "row": row_idx,
        "lime": lime.to_document(),
        "shapley": shap.to_document(),
        "pdp": [g.to_document() for g in grids],
        "ale": [g.to_document() for g in ales],
        "importances": dict(zip(names, predictor.feature_importances().tolist())),
    }
    write_json(config.out_dir / "explanations.json", doc)

    if config.plots:
        out = config.out_dir
        for g in grids:
            name = g.feature_names[0]
            out.joinpath(f"pdp_{name}.svg").write_text(
                svg_line_chart(g.grid[0], g.values, f"PDP: {name}")
            )
        for g in ales:
            name = g.feature_names[0]
            out.joinpath(f"ale_{name}.svg").write_text(
                svg_line_chart(g.grid[0], g.values, f"ALE: {name}")
            )
        imp = predictor.feature_importances()
        out.joinpath("importance.svg").write_text(
            svg_bar_chart(names, imp, f"{model_doc['family']} feature importances")
        )
    return doc


def _to_raw_units(values: np.ndarray, model_doc: dict) -> dict:
    """Map a model-space row back to clinician units: numeric features
    de-standardized, nominal codes replaced by category labels."""
    out = {}
    for j, f in enumerate(model_doc["features"]):
        v = float(values[j])
        if f["kind"] == "numeric":
            out[f["name"]] = v * f["std"] + f["mean"]
        else:
            cats = f["categories"]
            out[f["name"]] = cats[int(round(v))] if cats else v
    return out


def run_counterfactual(config: PipelineConfig, row: int | None = None) -> dict:
    model_doc, predictor, names, kinds, X = _model_context(config, "counterfactual")
    row_idx = config.row if row is None else row
    if not 0 <= row_idx < len(X):
        raise StageError("counterfactual", f"row {row_idx} out of range 0..{len(X) - 1}")
    x = X[row_idx]
    original_class = int(predictor.predict(x[None, :])[0])
    target = 1 - original_class
    nominal_mask = np.array([k == "nominal" for k in kinds])
    categories = {
        j: len(f["categories"])
        for j, f in enumerate(model_doc["features"])
        if f["kind"] == "nominal"
    }
    immutable_idx = {names.index(n) for n in config.immutables if n in names}

    result = cfx.counterfactual_search(
        predictor,
        x,
        target,
        X,
        k=config.cf_k,
        immutables=immutable_idx,
        budget=config.cf_budget,
        seed=config.seed,
        nominal_mask=nominal_mask,
        categories=categories,
        feature_names=names,
    )
    doc = {
        "schema_version": SCHEMA_VERSION,
        "row": row_idx,
        "result": result.to_document(),
        "original_units": _to_raw_units(x, model_doc),
        "counterfactual_units": [
            _to_raw_units(c.row, model_doc) for c in result.counterfactuals
        ],
    }
    write_json(config.out_dir / "counterfactuals.json", doc)
    return doc


def run_metrics(config: PipelineConfig, inputs: str | None = None) -> dict:
    """Table-style scorecard.  With --inputs, score the supplied fixture
    (per-model importances or n_important, true/explanation sets,
    accuracy); otherwise score the trained families."""
    scorecard = []
    if inputs is not None:
        fixture = read_json(Path(inputs))
        d_total = fixture.get("d_total", mtr.DEFAULT_TOTAL_FEATURES)
        for entry in fixture["models"]:
            if "n_important" in entry:
                n_important = entry["n_important"]
            else:
                imp = mtr.important_set(
                    np.array(entry["importances"], dtype=np.float64),
                    entry["feature_names"],
                    cutoff=entry.get("cutoff", mtr.DEFAULT_CUTOFF),
                )
                n_important = imp.n_important
            report = mtr.interpretability_report(
                model=entry["model"],
                n_important=n_important,
                true_set=set(entry["true_set"]),
                explanation_set=set(entry["explanation_set"]),
                accuracy=entry["accuracy"],
                d_total=d_total,
                cosine=entry.get("cosine"),
            )
            scorecard.append(report.to_document())
    else:
        model_doc, _, names, _, X = _model_context(config, "metrics")
        eval_doc = read_json(_require(config.out_dir / "evaluation.json", "metrics", "train"))
        y = np.array(model_doc["training"]["y"], dtype=np.int64)
        sets = {}
        for family, entry in eval_doc["families"].items():
            imp = np.array([entry["importances"][n] for n in names], dtype=np.float64)
            if imp.sum() == 0:
                continue
            sets[family] = mtr.important_set(imp, names)
        if "DT" not in sets:
            raise StageError("metrics", "DT importances unavailable for the white-box reference")
        true_set = set(sets["DT"].members)
        for family, imp in sets.items():
            accuracy = eval_doc["families"][family]["report"]["accuracy"]
            report = mtr.interpretability_report(
                model=family,
                n_important=imp.n_important,
                true_set=true_set,
                explanation_set=set(imp.members),
                accuracy=accuracy,
                d_total=mtr.DEFAULT_TOTAL_FEATURES,
            )
            scorecard.append(report.to_document())
    doc = {"schema_version": SCHEMA_VERSION, "scorecard": scorecard}
    write_json(config.out_dir / "metrics.json", doc)
    return doc


def run_all(config: PipelineConfig) -> list[str]:
    run_profile(config)
    run_mcar(config)
    run_impute(config)
    run_select(config)
    run_train(config)
    run_explain(config)
    run_counterfactual(config)
    run_metrics(config)
    missing = [a for a in REPORT_ARTIFACTS if not (config.out_dir / a).is_file()]
    if missing:
        raise StageError("all", f"missing artifacts after run: {missing}")
    return list(REPORT_ARTIFACTS)
