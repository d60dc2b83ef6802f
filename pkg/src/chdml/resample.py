"""Synthetic minority oversampling (SMOTE).

New minority rows are interpolated between existing minority rows and
their nearest minority neighbors until the class counts reach the target
ratio.  Base rows are cycled round-robin in index order; per synthetic
row, one neighbor is drawn uniformly from the base's k nearest and one
gap u ~ U[0, 1) places the new point on the connecting segment.  All
randomness comes from a single generator seeded by ``SmoteParams.seed``,
so equal seeds give byte-identical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, SingleClass, TooFewMinority
from .preprocess import Dataset

__all__ = ["SmoteParams", "minority_neighbors", "smote"]


@dataclass(frozen=True)
class SmoteParams:
    """Oversampling knobs.

    ``target_ratio`` is the desired minority/majority count ratio (1.0 =
    parity).  ``round_nominal`` optionally snaps the listed columns of
    synthetic rows to the nearest integer, for callers who cannot accept
    fractional values in nominal columns; it is off by default because
    interpolation is defined on the full feature matrix.
    """

    k_neighbors: int = 5
    target_ratio: float = 1.0
    seed: int = 0
    round_nominal: bool = False
    nominal_columns: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.k_neighbors < 1:
            raise ConfigError("k_neighbors must be at least 1")
        if not self.target_ratio > 0:
            raise ConfigError("target_ratio must be positive")


def _pairwise_sq_dist(A: np.ndarray, B: np.ndarray, chunk: int = 256) -> np.ndarray:
    """Squared Euclidean distances, computed as literal coordinate
    differences (no norm expansion) so exact ties stay exact."""
    out = np.empty((A.shape[0], B.shape[0]), dtype=np.float64)
    for start in range(0, A.shape[0], chunk):
        stop = min(start + chunk, A.shape[0])
        diff = A[start:stop, None, :] - B[None, :, :]
        out[start:stop] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


def minority_neighbors(X_min: np.ndarray, k: int) -> np.ndarray:
    """Indices of each minority row's k nearest other minority rows.

    Self is excluded; k is clamped to n_min - 1; distance ties are broken
    by ascending row index.  Returns an (n_min, k_eff) integer array.
    """
    X = np.asarray(X_min, dtype=np.float64)
    n = X.shape[0]
    if n < 2:
        raise TooFewMinority("need at least 2 minority rows")
    k_eff = min(int(k), n - 1)
    d2 = _pairwise_sq_dist(X, X)
    np.fill_diagonal(d2, np.inf)
    # stable argsort keeps ascending row index on exact distance ties
    order = np.argsort(d2, axis=1, kind="stable")
    return order[:, :k_eff]


def smote(dataset: Dataset, params: SmoteParams) -> Dataset:
    """Append synthetic minority rows until counts reach the target ratio.

    Original rows are never touched and always precede the synthetics.
    Already-balanced input (at target_ratio 1.0) is returned unchanged.
    """
    n0, n1 = dataset.class_counts()
    if n0 == 0 or n1 == 0:
        raise SingleClass("both classes must be present to oversample")
    # on equal counts the positive class is treated as the minority
    minority_label = 1 if n1 <= n0 else 0
    n_min, n_maj = (n1, n0) if minority_label == 1 else (n0, n1)
    wanted = int(math.floor(params.target_ratio * n_maj + 0.5))
    n_new = wanted - n_min
    if n_new <= 0:
        return dataset
    if n_min < 2:
        raise TooFewMinority("need at least 2 minority rows")

    min_idx = np.flatnonzero(dataset.labels == minority_label)
    X_min = dataset.features[min_idx]
    neighbors = minority_neighbors(X_min, params.k_neighbors)
    k_eff = neighbors.shape[1]

    rng = np.random.default_rng(params.seed)
    synth = np.empty((n_new, dataset.n_features), dtype=np.float64)
    for t in range(n_new):
        base = t % n_min
        pick = neighbors[base, rng.integers(0, k_eff)]
        gap = rng.random()
        synth[t] = X_min[base] + gap * (X_min[pick] - X_min[base])
    if params.round_nominal and params.nominal_columns:
        cols = list(params.nominal_columns)
        synth[:, cols] = np.rint(synth[:, cols])

    features = np.vstack([dataset.features, synth])
    labels = np.concatenate(
        [dataset.labels, np.full(n_new, minority_label, dtype=np.int64)]
    )
    return Dataset(features=features, labels=labels, feature_names=dataset.feature_names)
