"""CSV ingestion for labeled intrusion-detection-style tables.

Categorical feature values are replaced by their occurrence counts in the
training table, every column is min-max scaled into [0, 1], and labels are
binarized to 0 = normal, 1 = anomaly/attack.  Encoding maps and scaling
bounds are fit on training data only and reused verbatim at test time; a
provenance hash ties train/test datasets to one transform.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from .errors import ConfigError, DataError

__all__ = [
    "TableSchema",
    "RawTable",
    "Dataset",
    "FoldPlan",
    "load_csv",
    "frequency_encode",
    "min_max_normalize",
    "binarize_labels",
    "build_dataset",
    "load_dataset",
    "make_folds",
    "save_dataset_cache",
    "load_dataset_cache",
]

_SCHEMA_KEYS = {
    "column_count",
    "label_column",
    "categorical_columns",
    "ignored_columns",
    "normal_labels",
    "attack_labels",
    "feature_names",
    "drop_duplicates",
}


@dataclass(frozen=True)
class TableSchema:
    """Column layout of a raw CSV table (indices are 0-based, no header row).

    ``normal_labels`` map to class 0.  When ``attack_labels`` is None every
    other label is an attack; otherwise a label in neither set is an error.
    """

    column_count: int
    label_column: int
    categorical_columns: tuple[int, ...] = ()
    ignored_columns: tuple[int, ...] = ()
    normal_labels: tuple[str, ...] = ("normal",)
    attack_labels: Optional[tuple[str, ...]] = None
    feature_names: Optional[tuple[str, ...]] = None
    drop_duplicates: bool = False

    def __post_init__(self):
        if self.column_count < 2:
            raise ConfigError("schema needs at least one feature column and a label column")
        if not 0 <= self.label_column < self.column_count:
            raise ConfigError(f"label_column {self.label_column} outside table width")
        special = set(self.ignored_columns) | {self.label_column}
        for c in list(self.categorical_columns) + list(self.ignored_columns):
            if not 0 <= c < self.column_count:
                raise ConfigError(f"column index {c} outside table width")
        if set(self.categorical_columns) & special:
            raise ConfigError("categorical_columns may not include label or ignored columns")
        if self.label_column in self.ignored_columns:
            raise ConfigError("label column cannot be ignored")
        n_feat = self.column_count - 1 - len(set(self.ignored_columns))
        if n_feat < 1:
            raise ConfigError("schema leaves no feature columns")
        if self.feature_names is not None and len(self.feature_names) != n_feat:
            raise ConfigError(
                f"feature_names has {len(self.feature_names)} entries, expected {n_feat}"
            )

    @property
    def feature_columns(self) -> list[int]:
        skip = set(self.ignored_columns) | {self.label_column}
        return [c for c in range(self.column_count) if c not in skip]

    def resolved_feature_names(self) -> list[str]:
        if self.feature_names is not None:
            return list(self.feature_names)
        return [f"f{i + 1}" for i in range(len(self.feature_columns))]

    @classmethod
    def from_yaml(cls, path) -> "TableSchema":
        try:
            raw = yaml.safe_load(Path(path).read_text())
        except OSError as exc:
            raise DataError(f"cannot read schema file {path}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"schema file {path} is not valid YAML: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"schema file {path} must hold a mapping")
        unknown = set(raw) - _SCHEMA_KEYS
        if unknown:
            raise ConfigError(f"schema file {path}: unknown keys {sorted(unknown)}")
        for key in ("column_count", "label_column"):
            if key not in raw:
                raise ConfigError(f"schema file {path}: missing required key '{key}'")

        def as_tuple(key, conv):
            value = raw.get(key)
            if value is None:
                return None
            if not isinstance(value, list):
                raise ConfigError(f"schema key '{key}' must be a list")
            return tuple(conv(v) for v in value)

        return cls(
            column_count=int(raw["column_count"]),
            label_column=int(raw["label_column"]),
            categorical_columns=as_tuple("categorical_columns", int) or (),
            ignored_columns=as_tuple("ignored_columns", int) or (),
            normal_labels=as_tuple("normal_labels", str) or ("normal",),
            attack_labels=as_tuple("attack_labels", str),
            feature_names=as_tuple("feature_names", str),
            drop_duplicates=bool(raw.get("drop_duplicates", False)),
        )

    def fingerprint(self) -> str:
        payload = {
            "column_count": self.column_count,
            "label_column": self.label_column,
            "categorical_columns": sorted(self.categorical_columns),
            "ignored_columns": sorted(self.ignored_columns),
            "normal_labels": sorted(self.normal_labels),
            "attack_labels": None if self.attack_labels is None else sorted(self.attack_labels),
            "feature_names": None if self.feature_names is None else list(self.feature_names),
        }
        blob = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


@dataclass
class RawTable:
    rows: list[list[str]]
    column_count: int

    def __len__(self):
        return len(self.rows)


@dataclass
class FoldPlan:
    k: int
    assignments: np.ndarray
    seed: int

    def fold_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)


@dataclass
class Dataset:
    """Normalized feature matrix plus binary labels and transform state."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: list[str]
    encoding_map: dict = field(default_factory=dict)
    normalization_bounds: Optional[tuple[np.ndarray, np.ndarray]] = None
    provenance: Optional[str] = None

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def take(self, rows) -> "Dataset":
        """Row subset sharing this dataset's transform state."""
        return Dataset(
            features=self.features[rows],
            labels=self.labels[rows],
            feature_names=self.feature_names,
            encoding_map=self.encoding_map,
            normalization_bounds=self.normalization_bounds,
            provenance=self.provenance,
        )

    @classmethod
    def from_arrays(cls, features, labels, feature_names=None) -> "Dataset":
        features = np.asarray(features, dtype=float)
        labels = np.asarray(labels, dtype=int)
        if features.ndim != 2 or labels.shape != (features.shape[0],):
            raise ValueError("features must be 2-D with one label per row")
        if feature_names is None:
            feature_names = [f"f{i + 1}" for i in range(features.shape[1])]
        return cls(features=features, labels=labels, feature_names=list(feature_names))


def load_csv(path, schema: TableSchema) -> RawTable:
    """Parse a headerless CSV into string cells, enforcing a uniform width."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    rows = []
    for lineno, row in enumerate(csv.reader(text.splitlines()), start=1):
        if not row:
            continue
        if len(row) != schema.column_count:
            raise DataError(
                f"{path}: row {lineno} has {len(row)} columns, expected {schema.column_count}"
            )
        rows.append([cell.strip() for cell in row])
    if not rows:
        raise DataError(f"{path}: no data rows")
    return RawTable(rows=rows, column_count=schema.column_count)


def frequency_encode(table: RawTable, categorical_columns, encoding: Optional[dict] = None):
    """Replace categories by occurrence counts; parse the rest as floats.

    Fitting (``encoding=None``) counts occurrences in this table.  With a
    supplied encoding (test time) unseen categories map to 0.
    Returns ``(matrix, encoding)`` where encoding maps column index to a
    {category: count} dict.
    """
    categorical = set(categorical_columns)
    if encoding is None:
        encoding = {}
        for c in categorical:
            counts: dict[str, float] = {}
            for row in table.rows:
                counts[row[c]] = counts.get(row[c], 0.0) + 1.0
            encoding[c] = counts
    matrix = np.empty((len(table.rows), table.column_count), dtype=float)
    for i, row in enumerate(table.rows):
        for c, cell in enumerate(row):
            if c in categorical:
                matrix[i, c] = encoding[c].get(cell, 0.0)
            else:
                try:
                    matrix[i, c] = float(cell)
                except ValueError:
                    raise DataError(
                        f"row {i + 1}, column {c + 1}: cannot parse {cell!r} as a number"
                    ) from None
    return matrix, encoding


def min_max_normalize(matrix, bounds=None):
    """Scale each column into [0, 1]; constant columns map to 0.

    With precomputed ``bounds`` (training-time minima/maxima) values are
    transformed and then clipped into [0, 1].  Returns ``(scaled, bounds)``.
    """
    matrix = np.asarray(matrix, dtype=float)
    if not np.all(np.isfinite(matrix)):
        bad = np.argwhere(~np.isfinite(matrix))[0]
        raise DataError(f"non-finite value at row {bad[0] + 1}, column {bad[1] + 1}")
    fitted = bounds is None
    if fitted:
        bounds = (matrix.min(axis=0), matrix.max(axis=0))
    mins, maxs = bounds
    span = maxs - mins
    safe_span = np.where(span > 0, span, 1.0)
    scaled = (matrix - mins) / safe_span
    scaled[:, span <= 0] = 0.0
    if not fitted:
        scaled = np.clip(scaled, 0.0, 1.0)
    return scaled, (np.asarray(mins, dtype=float), np.asarray(maxs, dtype=float))


def binarize_labels(raw_labels, schema: TableSchema) -> np.ndarray:
    """0 for normal labels, 1 for attacks, per the schema's label rule."""
    normal = set(schema.normal_labels)
    attack = None if schema.attack_labels is None else set(schema.attack_labels)
    out = np.empty(len(raw_labels), dtype=int)
    for i, label in enumerate(raw_labels):
        if label in normal:
            out[i] = 0
        elif attack is None or label in attack:
            out[i] = 1
        else:
            raise DataError(f"row {i + 1}: label {label!r} matches neither label set")
    return out


def _dedup(table: RawTable) -> RawTable:
    seen = set()
    rows = []
    for row in table.rows:
        key = tuple(row)
        if key not in seen:
            seen.add(key)
            rows.append(row)
    return RawTable(rows=rows, column_count=table.column_count)


def _provenance(schema: TableSchema, encoding: dict, bounds) -> str:
    digest = hashlib.sha256()
    digest.update(schema.fingerprint().encode())
    digest.update(json.dumps({str(k): sorted(v.items()) for k, v in encoding.items()}, sort_keys=True).encode())
    digest.update(np.ascontiguousarray(bounds[0]).tobytes())
    digest.update(np.ascontiguousarray(bounds[1]).tobytes())
    return digest.hexdigest()


def build_dataset(
    table: RawTable,
    schema: TableSchema,
    fit_from: Optional[Dataset] = None,
    dedup: Optional[bool] = None,
) -> Dataset:
    """Full transform of a raw table into a Dataset.

    ``fit_from`` supplies a training dataset whose encoding maps and scaling
    bounds are reused (test-time path); otherwise both are fit here.
    """
    if dedup is None:
        dedup = schema.drop_duplicates
    if dedup:
        table = _dedup(table)
    feature_cols = schema.feature_columns
    feature_rows = [[row[c] for c in feature_cols] for row in table.rows]
    features_table = RawTable(rows=feature_rows, column_count=len(feature_cols))
    col_to_feature = {c: i for i, c in enumerate(feature_cols)}
    categorical = [col_to_feature[c] for c in schema.categorical_columns]

    if fit_from is None:
        numeric, encoding = frequency_encode(features_table, categorical)
        scaled, bounds = min_max_normalize(numeric)
    else:
        if fit_from.normalization_bounds is None:
            raise DataError("fit_from dataset carries no normalization bounds")
        numeric, encoding = frequency_encode(features_table, categorical, fit_from.encoding_map)
        scaled, bounds = min_max_normalize(numeric, fit_from.normalization_bounds)

    labels = binarize_labels([row[schema.label_column] for row in table.rows], schema)
    provenance = (
        fit_from.provenance if fit_from is not None else _provenance(schema, encoding, bounds)
    )
    return Dataset(
        features=scaled,
        labels=labels,
        feature_names=schema.resolved_feature_names(),
        encoding_map=encoding,
        normalization_bounds=bounds,
        provenance=provenance,
    )


def load_dataset(path, schema: TableSchema, fit_from: Optional[Dataset] = None, dedup=None) -> Dataset:
    return build_dataset(load_csv(path, schema), schema, fit_from=fit_from, dedup=dedup)


def make_folds(n_rows: int, k: int, seed: int) -> FoldPlan:
    """Seeded permutation dealt round-robin into k folds (sizes differ by <= 1)."""
    if k < 2:
        raise ValueError("need at least 2 folds")
    if k > n_rows:
        raise ValueError(f"cannot split {n_rows} rows into {k} folds")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n_rows)
    assignments = np.empty(n_rows, dtype=int)
    assignments[perm] = np.arange(n_rows) % k
    return FoldPlan(k=k, assignments=assignments, seed=seed)


def save_dataset_cache(dataset: Dataset, out_dir) -> None:
    """Columnar cache: features.npz plus a JSON manifest of the transform."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if dataset.normalization_bounds is None:
        raise DataError("dataset has no normalization bounds to cache")
    mins, maxs = dataset.normalization_bounds
    np.savez(out_dir / "features.npz", features=dataset.features, labels=dataset.labels)
    manifest = {
        "feature_names": dataset.feature_names,
        "encoding_map": {str(k): v for k, v in dataset.encoding_map.items()},
        "bounds_min": mins.tolist(),
        "bounds_max": maxs.tolist(),
        "provenance": dataset.provenance,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2))


def load_dataset_cache(cache_dir) -> Dataset:
    cache_dir = Path(cache_dir)
    try:
        arrays = np.load(cache_dir / "features.npz")
        manifest = json.loads((cache_dir / "manifest.json").read_text())
    except OSError as exc:
        raise DataError(f"cannot read dataset cache in {cache_dir}: {exc}") from exc
    return Dataset(
        features=arrays["features"],
        labels=arrays["labels"],
        feature_names=list(manifest["feature_names"]),
        encoding_map={int(k): v for k, v in manifest["encoding_map"].items()},
        normalization_bounds=(
            np.asarray(manifest["bounds_min"], dtype=float),
            np.asarray(manifest["bounds_max"], dtype=float),
        ),
        provenance=manifest["provenance"],
    )
