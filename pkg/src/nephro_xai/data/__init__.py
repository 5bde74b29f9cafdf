"""Bundled schema, default configuration and the surrogate CKD dataset."""

from importlib import resources
import json

from nephro_xai.tabular import ColumnSpec


def load_ckd_schema() -> tuple[ColumnSpec, ...]:
    text = resources.files("nephro_xai.data").joinpath("ckd_schema.json").read_text()
    doc = json.loads(text)
    return tuple(
        ColumnSpec(c["name"], c["kind"], tuple(c.get("categories", ()))) for c in doc["columns"]
    )


def surrogate_csv_text() -> str:
    return resources.files("nephro_xai.data").joinpath("ckd_surrogate.csv").read_text()


TARGET_COLUMN = "class"
