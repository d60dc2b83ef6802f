"""Shared classifier contract: specs, defaults, and the scoring interface.

Every algorithm implements ``fit`` into a model object exposing
``score_one``/``score_many`` plus JSON (de)serialization.  Five of the six
produce probabilities in [0, 1] thresholded strictly above 0.5; the SVM
produces an unbounded decision value thresholded strictly above 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from ..errors import (
    ConfigError,
    DimensionMismatch,
    NonFiniteFeature,
    SingleClass,
    UnknownHyperparameter,
)
from ..preprocess import Dataset

__all__ = [
    "ALGORITHMS",
    "DEFAULT_HYPERPARAMETERS",
    "ClassifierSpec",
    "Prediction",
    "FORMAT_VERSION",
]

ALGORITHMS = ("LR", "KNN", "CART", "NB", "SVM", "RF")

#: Fixed defaults; every report records the resolved values so results
#: are self-describing.
DEFAULT_HYPERPARAMETERS: Mapping[str, Mapping[str, float]] = {
    "LR": {"lambda": 1.0, "step": 0.1, "max_iter": 1000, "tol": 1e-6},
    "KNN": {"k": 5},
    "CART": {"min_samples_split": 2, "max_depth": 0},  # 0 = unrestricted
    "NB": {"var_floor_ratio": 1e-9},
    "SVM": {"C": 1.0, "gamma": 0.0, "tol": 1e-3},  # gamma 0 = 1/(d * mean var)
    "RF": {
        "n_trees": 100,
        "mtry": 0,  # 0 = floor(sqrt(d))
        "bootstrap": 1,  # 0 = identity sample (no resampling)
        "min_samples_split": 2,
        "max_depth": 0,
    },
}

FORMAT_VERSION = 1


@dataclass(frozen=True)
class ClassifierSpec:
    """Algorithm choice plus hyperparameter overrides and a seed.

    Unknown hyperparameter names are rejected at construction so a typo
    cannot silently fall back to a default.
    """

    algorithm: str
    hyperparameters: Mapping[str, float] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self) -> None:
        algo = str(self.algorithm).upper()
        if algo not in ALGORITHMS:
            raise ConfigError(
                f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}"
            )
        object.__setattr__(self, "algorithm", algo)
        allowed = set(DEFAULT_HYPERPARAMETERS[algo])
        for name in self.hyperparameters:
            if name not in allowed:
                raise UnknownHyperparameter(algo, name)
        object.__setattr__(self, "hyperparameters", dict(self.hyperparameters))

    def resolved(self) -> dict[str, float]:
        """Defaults overlaid with this spec's overrides."""
        merged = dict(DEFAULT_HYPERPARAMETERS[self.algorithm])
        merged.update(self.hyperparameters)
        return merged

    def replace(self, **changes: Any) -> "ClassifierSpec":
        merged = {
            "algorithm": self.algorithm,
            "hyperparameters": dict(self.hyperparameters),
            "seed": self.seed,
        }
        merged.update(changes)
        return ClassifierSpec(**merged)

    def to_doc(self) -> dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "hyperparameters": dict(self.hyperparameters),
            "seed": int(self.seed),
        }

    @classmethod
    def from_doc(cls, doc: Mapping[str, Any]) -> "ClassifierSpec":
        return cls(
            algorithm=doc["algorithm"],
            hyperparameters=dict(doc.get("hyperparameters", {})),
            seed=int(doc.get("seed", 0)),
        )


@dataclass(frozen=True)
class Prediction:
    """A raw score plus the thresholded hard label."""

    score: float
    label: int


def check_train(train: Dataset, require_both_classes: bool = True) -> None:
    if train.n_rows == 0:
        raise SingleClass("training data is empty")
    if not np.isfinite(train.features).all():
        raise NonFiniteFeature("training features contain NaN or infinity")
    if require_both_classes:
        n0, n1 = train.class_counts()
        if n0 == 0 or n1 == 0:
            raise SingleClass("training data contains a single class")


def check_vector(x: np.ndarray, n_features: int) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != n_features:
        raise DimensionMismatch(
            f"expected a vector of length {n_features}, got shape {arr.shape}"
        )
    return arr


def check_matrix(X: np.ndarray, n_features: int) -> np.ndarray:
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != n_features:
        raise DimensionMismatch(
            f"expected a matrix with {n_features} columns, got shape {arr.shape}"
        )
    return arr


def dump_doc(doc: Mapping[str, Any]) -> str:
    """Serialize a model document; floats keep full repr precision."""
    return json.dumps(doc, indent=2)
