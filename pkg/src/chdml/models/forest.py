"""Random forest: bagged Gini trees with per-split feature subsampling."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from ..preprocess import Dataset
from ..rng import generator
from .base import ClassifierSpec, check_matrix, check_train
from .tree import Tree, build_tree

__all__ = ["ForestModel", "fit"]


@dataclass(frozen=True)
class ForestModel:
    spec: ClassifierSpec
    trees: tuple[Tree, ...]
    n_features: int

    def score_many(self, X: np.ndarray) -> np.ndarray:
        """Mean of the per-tree leaf scores."""
        X = check_matrix(X, self.n_features)
        total = np.zeros(X.shape[0], dtype=np.float64)
        for tree in self.trees:
            total += tree.score_many(X)
        return total / len(self.trees)

    def parameters_doc(self) -> dict[str, Any]:
        return {
            "n_features": int(self.n_features),
            "trees": [t.to_doc() for t in self.trees],
        }

    @classmethod
    def from_parameters_doc(
        cls, spec: ClassifierSpec, doc: Mapping[str, Any]
    ) -> "ForestModel":
        return cls(
            spec=spec,
            trees=tuple(Tree.from_doc(d) for d in doc["trees"]),
            n_features=int(doc["n_features"]),
        )


def fit(spec: ClassifierSpec, train: Dataset) -> ForestModel:
    """Train ``n_trees`` trees, each on its own bootstrap sample.

    Tree t draws all its randomness from a generator derived from
    (seed, t), so training is reproducible and could be parallelized
    without changing the result.  ``mtry`` 0 resolves to floor(sqrt(d));
    ``bootstrap`` 0 uses the training rows as-is (no resampling), which
    pins a single-tree forest to the plain tree exactly.
    """
    check_train(train, require_both_classes=False)
    hp = spec.resolved()
    n_trees = int(round(hp["n_trees"]))
    if n_trees < 1:
        n_trees = 1
    d = train.n_features
    mtry = int(round(hp["mtry"])) or int(math.floor(math.sqrt(d)))
    mtry = min(max(mtry, 1), d)
    use_bootstrap = bool(int(round(hp["bootstrap"])))
    min_samples_split = int(round(hp["min_samples_split"]))
    max_depth = int(round(hp["max_depth"]))

    X, y = train.features, train.labels
    n = train.n_rows
    trees = []
    for t in range(n_trees):
        rng = generator(spec.seed, t)
        if use_bootstrap:
            sample = rng.integers(0, n, size=n)
            Xt, yt = X[sample], y[sample]
        else:
            Xt, yt = X, y
        trees.append(
            build_tree(
                Xt,
                yt,
                min_samples_split=min_samples_split,
                max_depth=max_depth,
                rng=rng,
                mtry=mtry,
            )
        )
    return ForestModel(spec=spec, trees=tuple(trees), n_features=d)
