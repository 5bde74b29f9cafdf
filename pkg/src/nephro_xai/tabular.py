"""Dataset schema, CSV ingestion, standardization and model encoding.

A :class:`DataTable` stores numeric columns as float arrays (``nan`` marks
a missing cell) and nominal columns as integer category codes (``-1``
marks a missing cell).  Tables are immutable after construction: every
operation returns a new table and the backing arrays are write-locked.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace

import numpy as np


class _Missing:
    """Sentinel for a missing cell in cell-level APIs."""

    def __repr__(self) -> str:
        return "MISSING"


class _Fit:
    """Sentinel asking :func:`standardize` to fit parameters from the data."""

    def __repr__(self) -> str:
        return "FIT"


MISSING = _Missing()
FIT = _Fit()

#: tokens that become MISSING during ingestion (after whitespace stripping)
MISSING_TOKENS = ("?", "")


class SchemaError(ValueError):
    """Schema construction or header mismatch problem."""


class ParseError(ValueError):
    """Malformed cell or row in the input stream."""


class ZeroVarianceError(ValueError):
    """A column with zero variance cannot be standardized."""

    def __init__(self, column: str):
        self.column = column
        super().__init__(f"column {column!r} has zero variance")


class MissingCellError(ValueError):
    """An operation requiring complete data met a MISSING cell."""


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str  # "numeric" | "nominal"
    categories: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("numeric", "nominal"):
            raise SchemaError(f"unknown column kind {self.kind!r}")
        if self.kind == "numeric" and self.categories:
            raise SchemaError(f"numeric column {self.name!r} cannot carry categories")
        if len(set(self.categories)) != len(self.categories):
            raise SchemaError(f"duplicate categories in column {self.name!r}")


def _lock(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DataTable:
    """Immutable typed table with explicit missing cells.

    ``columns[name]`` is float64 (nan = missing) for numeric columns and
    int64 (-1 = missing) for nominal columns.  ``target`` names the label
    column; by convention its first category encodes class 0 (CKD).
    """

    schema: tuple[ColumnSpec, ...]
    columns: dict[str, np.ndarray]
    target: str | None = None

    def __post_init__(self):
        names = [c.name for c in self.schema]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate column names in schema")
        if set(self.columns) != set(names):
            raise SchemaError("columns do not match schema")
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise SchemaError("ragged columns")
        if self.target is not None and self.target not in self.columns:
            raise SchemaError(f"target column {self.target!r} not in schema")
        for spec in self.schema:
            col = self.columns[spec.name]
            if spec.kind == "numeric":
                if col.dtype != np.float64:
                    raise SchemaError(f"numeric column {spec.name!r} must be float64")
                if not np.all(np.isfinite(col[~np.isnan(col)])):
                    raise SchemaError(f"non-finite value in column {spec.name!r}")
            else:
                if col.dtype != np.int64:
                    raise SchemaError(f"nominal column {spec.name!r} must be int64")
                if col.size and (col.max() >= len(spec.categories) or col.min() < -1):
                    raise SchemaError(f"category code out of range in {spec.name!r}")
            _lock(col)

    # -- shape and lookup ------------------------------------------------

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.schema]

    @property
    def feature_names(self) -> list[str]:
        return [c.name for c in self.schema if c.name != self.target]

    def spec(self, name: str) -> ColumnSpec:
        for c in self.schema:
            if c.name == name:
                return c
        raise SchemaError(f"unknown column {name!r}")

    def column(self, name: str) -> np.ndarray:
        return self.columns[name]

    def cell(self, row: int, name: str):
        v = self.columns[name][row]
        if self.spec(name).kind == "numeric":
            return MISSING if np.isnan(v) else float(v)
        return MISSING if v < 0 else int(v)

    def missing_mask(self, name: str) -> np.ndarray:
        col = self.columns[name]
        return np.isnan(col) if col.dtype == np.float64 else col < 0

    def missing_count(self) -> int:
        return int(sum(self.missing_mask(n).sum() for n in self.columns))

    def complete_row_mask(self) -> np.ndarray:
        mask = np.ones(self.n_rows, dtype=bool)
        for name in self.columns:
            mask &= ~self.missing_mask(name)
        return mask

    def class_counts(self) -> dict[str, int]:
        if self.target is None:
            raise SchemaError("table has no target column")
        spec = self.spec(self.target)
        col = self.columns[self.target]
        return {cat: int(np.sum(col == i)) for i, cat in enumerate(spec.categories)}

    # -- derivation ------------------------------------------------------

    def with_columns(self, updates: dict[str, np.ndarray]) -> "DataTable":
        cols = dict(self.columns)
        for name, arr in updates.items():
            if name not in cols:
                raise SchemaError(f"unknown column {name!r}")
            cols[name] = np.array(arr, dtype=cols[name].dtype)
        return replace(self, columns=cols)

    def select_rows(self, index: np.ndarray) -> "DataTable":
        return replace(self, columns={n: c[index].copy() for n, c in self.columns.items()})


@dataclass(frozen=True)
class StandardizationParams:
    """Per-column z-score parameters, numeric columns only."""

    means: dict[str, float]
    stds: dict[str, float]

    def __post_init__(self):
        for name, s in self.stds.items():
            if not s > 0:
                raise ZeroVarianceError(name)


def _clean(token: str) -> str:
    return token.strip(" \t\r\n")


def parse_dataset(
    stream: str | bytes | io.TextIOBase,
    schema: list[ColumnSpec] | tuple[ColumnSpec, ...],
    target: str | None = None,
) -> DataTable:
    """Parse a comma-delimited stream with a header row into a DataTable.

    Cells equal to ``?``, empty or whitespace-only become MISSING; all
    other cells are stripped of surrounding whitespace and tabs.  Nominal
    labels map to the schema's category order; unseen labels are appended
    in first-seen order.
    """
    if isinstance(stream, bytes):
        stream = stream.decode("utf-8")
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.reader(stream)
    try:
        header = [_clean(h) for h in next(reader)]
    except StopIteration:
        raise ParseError("empty input") from None

    by_name = {c.name: c for c in schema}
    for h in header:
        if h not in by_name:
            raise ParseError(f"unknown column {h!r}")
    if set(header) != set(by_name):
        missing_cols = sorted(set(by_name) - set(header))
        raise ParseError(f"header does not cover schema columns: {missing_cols}")

    categories: dict[str, list[str]] = {
        c.name: list(c.categories) for c in schema if c.kind == "nominal"
    }
    raw: dict[str, list] = {h: [] for h in header}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(f"ragged row at line {lineno}: {len(row)} cells, expected {len(header)}")
        for name, token in zip(header, row):
            token = _clean(token)
            spec = by_name[name]
            if token in MISSING_TOKENS:
                raw[name].append(np.nan if spec.kind == "numeric" else -1)
                continue
            if spec.kind == "numeric":
                try:
                    value = float(token)
                except ValueError:
                    raise ParseError(
                        f"non-numeric token {token!r} in numeric column {name!r} at line {lineno}"
                    ) from None
                if not np.isfinite(value):
                    raise ParseError(f"non-finite value in column {name!r} at line {lineno}")
                raw[name].append(value)
            else:
                cats = categories[name]
                if token not in cats:
                    cats.append(token)
                raw[name].append(cats.index(token))

    out_schema = tuple(
        replace(c, categories=tuple(categories[c.name])) if c.kind == "nominal" else c
        for c in schema
    )
    columns = {
        c.name: np.array(raw[c.name], dtype=np.float64 if c.kind == "numeric" else np.int64)
        for c in out_schema
    }
    return DataTable(schema=out_schema, columns=columns, target=target)


def _format_number(x: float) -> str:
    if float(x).is_integer():
        return str(int(x))
    return repr(float(x))


def serialize_dataset(table: DataTable) -> str:
    """Canonical CSV: header in schema order, MISSING as ``?``, shortest
    round-trip decimal representation for numbers."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.column_names)
    for r in range(table.n_rows):
        row = []
        for spec in table.schema:
            v = table.columns[spec.name][r]
            if spec.kind == "numeric":
                row.append("?" if np.isnan(v) else _format_number(v))
            else:
                row.append("?" if v < 0 else spec.categories[v])
        writer.writerow(row)
    return buf.getvalue()


def standardize(
    table: DataTable,
    params: StandardizationParams | _Fit = FIT,
) -> tuple[DataTable, StandardizationParams]:
    """Z-score transform x' = (x - mean) / std over numeric columns.

    With ``FIT`` the parameters come from the non-missing cells of each
    numeric column; MISSING cells stay MISSING either way.
    """
    if isinstance(params, _Fit):
        means, stds = {}, {}
        for spec in table.schema:
            if spec.kind != "numeric" or spec.name == table.target:
                continue
            col = table.columns[spec.name]
            observed = col[~np.isnan(col)]
            if observed.size == 0:
                raise ZeroVarianceError(spec.name)
            mean = float(observed.mean())
            std = float(observed.std())
            if std == 0.0:
                raise ZeroVarianceError(spec.name)
            means[spec.name], stds[spec.name] = mean, std
        params = StandardizationParams(means=means, stds=stds)

    updates = {}
    for name, mean in params.means.items():
        col = table.columns[name]
        updates[name] = (col - mean) / params.stds[name]
    return table.with_columns(updates), params


@dataclass(frozen=True)
class EncodedMatrix:
    """Dense numeric view of a complete table, ready for model training."""

    X: np.ndarray
    y: np.ndarray | None
    feature_names: list[str]
    feature_kinds: list[str]
    encoding: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        _lock(self.X)
        if self.y is not None:
            _lock(self.y)

    @property
    def nominal_mask(self) -> np.ndarray:
        return np.array([k == "nominal" for k in self.feature_kinds])

    def feature_index(self, name: str) -> int:
        return self.feature_names.index(name)

    def restrict(self, names: list[str]) -> "EncodedMatrix":
        idx = [self.feature_index(n) for n in names]
        return EncodedMatrix(
            X=self.X[:, idx].copy(),
            y=None if self.y is None else self.y.copy(),
            feature_names=[self.feature_names[i] for i in idx],
            feature_kinds=[self.feature_kinds[i] for i in idx],
            encoding={n: v for n, v in self.encoding.items() if n in names},
        )


def encode_for_model(table: DataTable) -> EncodedMatrix:
    """Encode a complete table as a numeric matrix plus label vector.

    Nominal columns become ordinal codes in the schema's stored category
    order (binary columns naturally encode as {0, 1}); numeric columns
    pass through.  Deterministic given the schema.
    """
    names, kinds, cols, encoding = [], [], [], {}
    y = None
    for spec in table.schema:
        col = table.columns[spec.name]
        if table.missing_mask(spec.name).any():
            raise MissingCellError(f"MISSING cell in column {spec.name!r}; impute first")
        if spec.name == table.target:
            y = col.astype(np.int64).copy()
            continue
        names.append(spec.name)
        kinds.append(spec.kind)
        cols.append(col.astype(np.float64))
        if spec.kind == "nominal":
            encoding[spec.name] = spec.categories
    X = np.column_stack(cols) if cols else np.empty((table.n_rows, 0))
    return EncodedMatrix(X=X, y=y, feature_names=names, feature_kinds=kinds, encoding=encoding)
