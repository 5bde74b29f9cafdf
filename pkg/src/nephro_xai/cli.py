"""Command-line entry point.

Exit codes: 0 success, 2 config error, 3 data error, 4 stage failure.
"""

from __future__ import annotations

import functools
import sys

import click

from nephro_xai import pipeline
from nephro_xai.tabular import ParseError, SchemaError

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_STAGE = 4


def _common_options(f):
    @click.option("--config", "config_path", type=str, default=None, help="INI config file.")
    @click.option("--data", type=str, default=None, help="Dataset CSV (default: bundled).")
    @click.option("--out", type=str, default=None, help="Output directory.")
    @click.option("--seed", type=int, default=None, help="Pipeline seed.")
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        return f(*args, **kwargs)

    return wrapper


def _build_config(config_path, data, out, seed, **extra) -> pipeline.PipelineConfig:
    try:
        return pipeline.load_config(config_path, dataset=data, out=out, seed=seed, **extra)
    except pipeline.ConfigError as exc:
        raise SystemExit(_fail(EXIT_CONFIG, str(exc)))


def _fail(code: int, message: str) -> int:
    click.echo(f"error: {message}", err=True)
    return code


def _run(stage_fn, *args, **kwargs):
    try:
        return stage_fn(*args, **kwargs)
    except pipeline.ConfigError as exc:
        raise SystemExit(_fail(EXIT_CONFIG, str(exc)))
    except (ParseError, SchemaError, FileNotFoundError) as exc:
        raise SystemExit(_fail(EXIT_DATA, str(exc)))
    except pipeline.StageError as exc:
        raise SystemExit(_fail(EXIT_STAGE, str(exc)))
    except Exception as exc:  # stage-internal failures map to exit 4
        raise SystemExit(_fail(EXIT_STAGE, f"{type(exc).__name__}: {exc}"))


@click.group()
def main():
    """CKD prediction and explanation pipeline."""


@main.command()
@_common_options
def profile(config_path, data, out, seed):
    """Per-feature missingness report."""
    cfg = _build_config(config_path, data, out, seed)
    doc = _run(pipeline.run_profile, cfg)
    click.echo(doc["rendered"])


@main.command()
@_common_options
@click.option("--sample-fraction", type=float, default=1.0, show_default=True)
def mcar(config_path, data, out, seed, sample_fraction):
    """Little's MCAR test report."""
    cfg = _build_config(config_path, data, out, seed)
    doc = _run(pipeline.run_mcar, cfg, sample_fraction=sample_fraction)
    click.echo(
        f"statistic={doc['statistic']:.2f} df={doc['degrees_of_freedom']} "
        f"p_value={doc['p_value']:.3g} patterns={doc['n_patterns']} "
        f"n={doc['sample_size']}"
    )


@main.command()
@_common_options
def impute(config_path, data, out, seed):
    """Impute missing cells; writes imputed.csv and the plan audit."""
    cfg = _build_config(config_path, data, out, seed)
    doc = _run(pipeline.run_impute, cfg)
    click.echo(
        f"imputed {doc['imputed_cells']} cells "
        f"({doc['fallback_cells']} by mean/mode fallback)"
    )


@main.command()
@_common_options
@click.option("--exclude", multiple=True, help="Clinician exclusion (repeatable).")
def select(config_path, data, out, seed, exclude):
    """Run every selection method and the consensus rule."""
    extra = {"exclusions": ",".join(exclude)} if exclude else {}
    cfg = _build_config(config_path, data, out, seed, **extra)
    doc = _run(pipeline.run_select, cfg)
    click.echo("final features: " + ", ".join(doc["report"]["final"]))


@main.command()
@_common_options
@click.option("--model", type=str, default=None, help="Model family to ship (default RF).")
@click.option("--k", type=int, default=None, help="Cross-validation folds.")
def train(config_path, data, out, seed, model, k):
    """Train all families, evaluate by stratified k-fold, ship one artifact."""
    cfg = _build_config(config_path, data, out, seed, model=model, k=k)
    doc = _run(pipeline.run_train, cfg)
    for family, entry in doc["families"].items():
        r = entry["report"]
        click.echo(f"{family:4s} acc={r['accuracy']:.3f} f1={r['f1']:.3f}")
    click.echo(f"shipped model: {doc['chosen_model']}")


@main.command()
@_common_options
@click.option("--row", type=int, default=None, help="Row index to explain.")
def explain(config_path, data, out, seed, row):
    """LIME, Shapley, PDP and ALE documents for one row."""
    cfg = _build_config(config_path, data, out, seed)
    doc = _run(pipeline.run_explain, cfg, row=row)
    phi = doc["shapley"]["phi"]
    names = doc["shapley"]["feature_names"]
    ranked = sorted(zip(names, phi), key=lambda t: -abs(t[1]))
    click.echo("row {}: top attributions".format(doc["row"]))
    for name, value in ranked[:5]:
        click.echo(f"  {name:6s} {value:+.4f}")


@main.command()
@_common_options
@click.option("--row", type=int, default=None, help="Row index to counter.")
def counterfactual(config_path, data, out, seed, row):
    """Counterfactual table for one row."""
    cfg = _build_config(config_path, data, out, seed)
    doc = _run(pipeline.run_counterfactual, cfg, row=row)
    n = len(doc["result"]["counterfactuals"])
    click.echo(f"row {doc['row']}: {n} counterfactual(s) written")


@main.command()
@_common_options
@click.option("--inputs", type=str, default=None, help="Fixture JSON to score instead of trained models.")
def metrics(config_path, data, out, seed, inputs):
    """Interpretability / fidelity scorecard."""
    cfg = _build_config(config_path, data, out, seed)
    doc = _run(pipeline.run_metrics, cfg, inputs=inputs)
    header = f"{'model':8s} {'I':>5s} {'F1':>5s} {'FII':>5s} {'FAcc':>5s}"
    click.echo(header)
    for row_doc in doc["scorecard"]:
        click.echo(
            f"{row_doc['model']:8s} {row_doc['interpretability']:5.2f} "
            f"{row_doc['fidelity_f1']:5.2f} {row_doc['fii']:5.2f} {row_doc['facc']:5.2f}"
        )


@main.command(name="all")
@_common_options
def run_all(config_path, data, out, seed):
    """Run every stage in order."""
    cfg = _build_config(config_path, data, out, seed)
    artifacts = _run(pipeline.run_all, cfg)
    click.echo("artifacts: " + ", ".join(artifacts))


@main.command()
@_common_options
@click.option("--host", type=str, default=None)
@click.option("--port", type=int, default=None)
def serve(config_path, data, out, seed, host, port):
    """Start the HTTP explanation service over the trained artifact."""
    cfg = _build_config(config_path, data, out, seed, host=host, port=port)
    try:
        from nephro_xai.service import create_app
    except ImportError as exc:
        raise SystemExit(_fail(EXIT_CONFIG, f"service dependencies missing: {exc}"))
    model_path = cfg.out_dir / pipeline.MODEL_ARTIFACT
    if not model_path.is_file():
        raise SystemExit(_fail(EXIT_STAGE, "train required first"))
    import uvicorn

    app = create_app(model_path, cors_origins=cfg.cors_origins)
    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="warning")


if __name__ == "__main__":
    sys.exit(main())
