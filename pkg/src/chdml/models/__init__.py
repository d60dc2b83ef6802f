"""Six classifiers behind one train/score/predict contract.

========= ============================== =========================
algorithm model                          score
========= ============================== =========================
LR        logistic regression (GD)       probability in [0, 1]
KNN       k-nearest neighbors            probability in [0, 1]
CART      Gini decision tree             probability in [0, 1]
NB        Gaussian naive Bayes           probability in [0, 1]
SVM       RBF-kernel SVM (SMO)           unbounded decision value
RF        random forest                  probability in [0, 1]
========= ============================== =========================

Probability models predict label 1 strictly above 0.5; the SVM strictly
above 0, so a perfectly uninformative model predicts the negative class.
"""

from __future__ import annotations

import json
from typing import Any, Mapping, Union

import numpy as np

from ..errors import DataError
from ..preprocess import Dataset
from . import bayes, forest, linear, neighbors, svm, tree
from .base import (
    ALGORITHMS,
    DEFAULT_HYPERPARAMETERS,
    FORMAT_VERSION,
    ClassifierSpec,
    Prediction,
    check_vector,
    dump_doc,
)
from .bayes import NaiveBayesModel
from .forest import ForestModel
from .linear import LogisticModel
from .neighbors import KnnModel
from .svm import SvmModel
from .tree import CartModel

__all__ = [
    "ALGORITHMS",
    "DEFAULT_HYPERPARAMETERS",
    "ClassifierSpec",
    "Prediction",
    "TrainedModel",
    "fit",
    "score",
    "score_many",
    "predict",
    "threshold_for",
    "model_to_json",
    "model_from_json",
    "save_model",
    "load_model",
    "LogisticModel",
    "NaiveBayesModel",
    "KnnModel",
    "CartModel",
    "ForestModel",
    "SvmModel",
]

TrainedModel = Union[
    LogisticModel, NaiveBayesModel, KnnModel, CartModel, ForestModel, SvmModel
]

_FITTERS = {
    "LR": linear.fit,
    "NB": bayes.fit,
    "KNN": neighbors.fit,
    "CART": tree.fit,
    "RF": forest.fit,
    "SVM": svm.fit,
}

_CLASSES = {
    "LR": LogisticModel,
    "NB": NaiveBayesModel,
    "KNN": KnnModel,
    "CART": CartModel,
    "RF": ForestModel,
    "SVM": SvmModel,
}


def fit(spec: ClassifierSpec, train: Dataset) -> TrainedModel:
    """Train ``spec`` on ``train``; equal inputs give identical models."""
    return _FITTERS[spec.algorithm](spec, train)


def threshold_for(model: TrainedModel) -> float:
    """Decision threshold: 0 for the SVM, 0.5 for probability models."""
    return 0.0 if isinstance(model, SvmModel) else 0.5


def score_many(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    return model.score_many(X)


def score(model: TrainedModel, x: np.ndarray) -> float:
    """Score one feature vector."""
    x = check_vector(x, model.n_features)
    return float(model.score_many(x[None, :])[0])


def predict(model: TrainedModel, x: np.ndarray) -> Prediction:
    """Threshold the score; ties go to label 0 (strict inequality)."""
    s = score(model, x)
    return Prediction(score=s, label=int(s > threshold_for(model)))


def model_to_json(model: TrainedModel) -> str:
    doc: dict[str, Any] = {
        "format": FORMAT_VERSION,
        "spec": model.spec.to_doc(),
        "parameters": model.parameters_doc(),
    }
    return dump_doc(doc)


def model_from_json(text: str) -> TrainedModel:
    doc: Mapping[str, Any] = json.loads(text)
    if doc.get("format") != FORMAT_VERSION:
        raise DataError(f"unsupported model format {doc.get('format')!r}")
    spec = ClassifierSpec.from_doc(doc["spec"])
    return _CLASSES[spec.algorithm].from_parameters_doc(spec, doc["parameters"])


def save_model(model: TrainedModel, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(model_to_json(model))


def load_model(path: str) -> TrainedModel:
    with open(path, encoding="utf-8") as handle:
        return model_from_json(handle.read())
