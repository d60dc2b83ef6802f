"""Cleaning and descriptive statistics for cohort tables.

Covers per-column summaries (quartiles, skewness), mean imputation,
dropping rows with missing cells, two univariate outlier rules (IQR fence
and three-sigma), Pearson correlation, and z-score standardization.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    AllMissingColumn,
    ConfigError,
    DataError,
    EmptyColumn,
    TooFewValues,
    UnknownColumn,
    ZeroVarianceColumn,
)
from .ingest import CohortTable, FeatureKind

__all__ = [
    "ColumnStats",
    "OutlierReport",
    "Dataset",
    "column_stats",
    "impute_mean",
    "drop_rows_missing",
    "iqr_outlier_mask",
    "sigma_outlier_mask",
    "remove_outliers",
    "pearson_correlation",
    "standardize",
    "to_dataset",
    "select_features",
    "take_rows",
]

OUTLIER_METHODS = ("IQR", "Sigma")


@dataclass(frozen=True)
class ColumnStats:
    """Summary of one column (missing cells excluded by the caller).

    ``std`` uses the sample (n-1) convention; ``skewness`` is the third
    standardized moment g1 = m3 / m2^(3/2) with 1/n central moments, and is
    defined as 0 for constant columns.
    """

    n: int
    mean: float
    std: float
    min: float
    max: float
    q1: float
    median: float
    q3: float
    skewness: float


@dataclass(frozen=True)
class OutlierReport:
    """Flagged-cell counts per column for one detection method.

    ``total`` counts flagged cells, not rows: a row flagged in two columns
    contributes twice, exactly as per-column tallies add up.
    """

    method: str
    columns: Mapping[str, int]
    total: int

    def to_json(self) -> str:
        doc = {
            "method": self.method,
            "columns": {k: int(v) for k, v in self.columns.items()},
            "total": int(self.total),
        }
        return json.dumps(doc, indent=2)


@dataclass(frozen=True, eq=False)
class Dataset:
    """A dense, fully observed feature matrix with binary labels."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        X = np.array(self.features, dtype=np.float64)
        y = np.array(self.labels, dtype=np.int64)
        if X.ndim != 2:
            raise DataError("features must be a 2-D matrix")
        if len(y) != X.shape[0]:
            raise DataError("labels length must equal the number of rows")
        if not np.isfinite(X).all():
            raise DataError("features contain NaN or infinity")
        if not np.isin(y, (0, 1)).all():
            raise DataError("labels must be 0 or 1")
        names = tuple(self.feature_names) or tuple(
            f"x{i}" for i in range(X.shape[1])
        )
        if len(names) != X.shape[1]:
            raise DataError("feature_names length must equal the number of columns")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "feature_names", names)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def class_counts(self) -> tuple[int, int]:
        ones = int((self.labels == 1).sum())
        return len(self.labels) - ones, ones


def _present(values: np.ndarray) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    return v[~np.isnan(v)]


def column_stats(values: Sequence[float]) -> ColumnStats:
    """Describe one column.  Raises :class:`EmptyColumn` on no values."""
    v = _present(np.asarray(values, dtype=np.float64))
    n = v.size
    if n == 0:
        raise EmptyColumn("cannot summarize an empty column")
    mean = float(np.mean(v))
    std = float(np.std(v, ddof=1)) if n >= 2 else 0.0
    q1, median, q3 = (float(q) for q in np.quantile(v, (0.25, 0.5, 0.75)))
    m2 = float(np.mean((v - mean) ** 2))
    m3 = float(np.mean((v - mean) ** 3))
    skewness = 0.0 if m2 == 0.0 else m3 / m2**1.5
    return ColumnStats(
        n=n,
        mean=mean,
        std=std,
        min=float(v.min()),
        max=float(v.max()),
        q1=q1,
        median=median,
        q3=q3,
        skewness=skewness,
    )


def _check_columns(table: CohortTable, columns: Sequence[str]) -> None:
    for name in columns:
        if name not in table.schema.names:
            raise UnknownColumn(name)


def impute_mean(table: CohortTable, columns: Sequence[str]) -> CohortTable:
    """Replace missing cells in the named columns by the column mean.

    Present cells are never touched.  Raises :class:`AllMissingColumn` when
    a named column has no present values to average.
    """
    _check_columns(table, columns)
    new: dict[str, np.ndarray] = {}
    for name in columns:
        vec = table.columns[name]
        missing = np.isnan(vec)
        if not missing.any():
            continue
        present = vec[~missing]
        if present.size == 0:
            raise AllMissingColumn(name)
        filled = vec.copy()
        filled[missing] = present.mean()
        new[name] = filled
    return table.replace_columns(new) if new else table


def drop_rows_missing(table: CohortTable, columns: Sequence[str]) -> CohortTable:
    """Remove every row with a missing cell in any named column."""
    _check_columns(table, columns)
    if not columns:
        return table
    bad = np.zeros(table.row_count, dtype=bool)
    for name in columns:
        bad |= np.isnan(table.columns[name])
    if not bad.any():
        return table
    return table.take_rows(~bad)


def iqr_outlier_mask(values: Sequence[float]) -> np.ndarray:
    """Flag values beyond 1.5 interquartile ranges outside [Q1, Q3].

    A value x is flagged when x > Q3 + 1.5*IQR or x < Q1 - 1.5*IQR
    (strict inequalities, IQR = Q3 - Q1).  Quartiles use the same linear
    interpolation as :func:`column_stats`.  Missing cells are never
    flagged.  Requires at least 4 present values.
    """
    v = np.asarray(values, dtype=np.float64)
    present = _present(v)
    if present.size < 4:
        raise TooFewValues("IQR rule needs at least 4 values")
    q1, q3 = np.quantile(present, (0.25, 0.75))
    spread = q3 - q1
    lo, hi = q1 - 1.5 * spread, q3 + 1.5 * spread
    with np.errstate(invalid="ignore"):
        return (v > hi) | (v < lo)


def sigma_outlier_mask(values: Sequence[float]) -> np.ndarray:
    """Flag values more than three sample standard deviations from the mean.

    A value x is flagged when |x - mean| > 3*s (strict), s the sample
    standard deviation.  Constant columns flag nothing.  Missing cells are
    never flagged.  Requires at least 2 present values.
    """
    v = np.asarray(values, dtype=np.float64)
    present = _present(v)
    if present.size < 2:
        raise TooFewValues("sigma rule needs at least 2 values")
    mean = present.mean()
    s = present.std(ddof=1)
    with np.errstate(invalid="ignore"):
        return np.abs(v - mean) > 3.0 * s


_MASKS = {"IQR": iqr_outlier_mask, "Sigma": sigma_outlier_mask}


def normalize_method(method: str) -> str:
    key = str(method).strip().lower()
    for canonical in OUTLIER_METHODS:
        if key == canonical.lower():
            return canonical
    raise ConfigError(f"unknown outlier method {method!r}; choose from {OUTLIER_METHODS}")


def remove_outliers(
    table: CohortTable, method: str, columns: Sequence[str]
) -> tuple[CohortTable, OutlierReport]:
    """Drop rows containing flagged cells in the named columns.

    All masks are computed from the table as given (a single pass with
    pre-removal statistics); the report counts flagged cells per column
    before any row is dropped.
    """
    _check_columns(table, columns)
    method = normalize_method(method)
    mask_fn = _MASKS[method]
    counts: dict[str, int] = {}
    bad = np.zeros(table.row_count, dtype=bool)
    for name in columns:
        mask = mask_fn(table.columns[name])
        counts[name] = int(mask.sum())
        bad |= mask
    report = OutlierReport(method=method, columns=counts, total=sum(counts.values()))
    cleaned = table.take_rows(~bad) if bad.any() else table
    return cleaned, report


def pearson_correlation(dataset: Dataset) -> np.ndarray:
    """Pairwise Pearson correlation of the feature columns.

    Raises :class:`ZeroVarianceColumn` naming the first constant column.
    """
    X = dataset.features
    variances = X.var(axis=0)
    for i, v in enumerate(variances):
        if v == 0.0:
            raise ZeroVarianceColumn(dataset.feature_names[i])
    corr = np.corrcoef(X, rowvar=False)
    corr = np.clip(corr, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return corr


def standardize(train: Dataset, apply_to: Dataset) -> Dataset:
    """Z-score ``apply_to`` using mean and sample std taken from ``train``.

    The statistics always come from ``train`` only, so applying train
    statistics to unseen data leaks nothing.  Raises
    :class:`ZeroVarianceColumn` when a train column is constant.
    """
    if train.n_features != apply_to.n_features:
        raise DataError("train and apply_to have different feature counts")
    mu = train.features.mean(axis=0)
    sigma = train.features.std(axis=0, ddof=1)
    for i, s in enumerate(sigma):
        if s == 0.0 or not np.isfinite(s):
            raise ZeroVarianceColumn(train.feature_names[i])
    return Dataset(
        features=(apply_to.features - mu) / sigma,
        labels=apply_to.labels,
        feature_names=apply_to.feature_names,
    )


def to_dataset(table: CohortTable) -> Dataset:
    """Convert a fully observed table into a feature matrix and labels.

    Predictors keep schema order; the target column supplies the labels.
    Raises :class:`DataError` if any predictor cell is still missing.
    """
    names = table.schema.predictor_names
    X = np.column_stack([table.columns[n] for n in names])
    if np.isnan(X).any():
        missing = [n for n in names if np.isnan(table.columns[n]).any()]
        raise DataError(f"columns still contain missing cells: {missing}")
    y = table.columns[table.schema.target_name].astype(np.int64)
    return Dataset(features=X, labels=y, feature_names=names)


def feature_kinds(table: CohortTable) -> tuple[FeatureKind, ...]:
    """Kinds of the predictor columns, in predictor order."""
    return tuple(
        table.schema.column(n).kind for n in table.schema.predictor_names
    )


def select_features(dataset: Dataset, indices: Sequence[int]) -> Dataset:
    """Keep only the named feature columns, in the order given."""
    idx = list(indices)
    return Dataset(
        features=dataset.features[:, idx],
        labels=dataset.labels,
        feature_names=tuple(dataset.feature_names[i] for i in idx),
    )


def take_rows(dataset: Dataset, indices: np.ndarray) -> Dataset:
    """Row subset of a dataset (indices may be a mask or index array)."""
    return Dataset(
        features=dataset.features[indices],
        labels=dataset.labels[indices],
        feature_names=dataset.feature_names,
    )
