"""L2-regularized logistic regression trained by full-batch gradient descent.

The objective is the mean negative log-likelihood plus (lambda/2n)*||w||^2
with the bias left unpenalized:

    J(w, b) = mean_i [ log(1 + exp(z_i)) - y_i * z_i ] + lambda/(2n) * w.w,
    z_i = w.x_i + b.

Each iteration starts from the configured step size and halves it until
the candidate point does not increase the loss, so the training loss is
non-increasing across accepted iterations.  Training stops when the
gradient's infinity norm drops below ``tol`` or after ``max_iter``
iterations (the model then carries ``converged=False`` instead of
raising).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from ..preprocess import Dataset
from .base import ClassifierSpec, check_matrix, check_train

__all__ = ["sigmoid", "nll_loss", "nll_gradient", "LogisticModel", "fit"]

_MAX_HALVINGS = 60


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    return np.exp(-np.logaddexp(0.0, -np.asarray(z, dtype=np.float64)))


def nll_loss(
    w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, lam: float
) -> float:
    """Regularized mean negative log-likelihood."""
    n = len(y)
    z = X @ w + b
    # log(1 + e^z) - y z, computed via logaddexp for stability
    data_term = float(np.mean(np.logaddexp(0.0, z) - y * z))
    return data_term + lam / (2.0 * n) * float(np.dot(w, w))


def nll_gradient(
    w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, lam: float
) -> tuple[np.ndarray, float]:
    """Analytic gradient of :func:`nll_loss` in (w, b)."""
    n = len(y)
    residual = sigmoid(X @ w + b) - y
    grad_w = X.T @ residual / n + (lam / n) * w
    grad_b = float(np.mean(residual))
    return grad_w, grad_b


@dataclass(frozen=True)
class LogisticModel:
    spec: ClassifierSpec
    weights: np.ndarray
    bias: float
    converged: bool

    @property
    def n_features(self) -> int:
        return len(self.weights)

    def score_many(self, X: np.ndarray) -> np.ndarray:
        X = check_matrix(X, self.n_features)
        return sigmoid(X @ self.weights + self.bias)

    def parameters_doc(self) -> dict[str, Any]:
        return {
            "weights": [float(v) for v in self.weights],
            "bias": float(self.bias),
            "converged": bool(self.converged),
        }

    @classmethod
    def from_parameters_doc(
        cls, spec: ClassifierSpec, doc: Mapping[str, Any]
    ) -> "LogisticModel":
        return cls(
            spec=spec,
            weights=np.asarray(doc["weights"], dtype=np.float64),
            bias=float(doc["bias"]),
            converged=bool(doc["converged"]),
        )


def fit(spec: ClassifierSpec, train: Dataset) -> LogisticModel:
    check_train(train, require_both_classes=True)
    hp = spec.resolved()
    lam = float(hp["lambda"])
    step0 = float(hp["step"])
    max_iter = int(round(hp["max_iter"]))
    tol = float(hp["tol"])

    X = train.features
    y = train.labels.astype(np.float64)
    w = np.zeros(train.n_features, dtype=np.float64)
    b = 0.0
    loss = nll_loss(w, b, X, y, lam)
    converged = False

    for _ in range(max_iter):
        grad_w, grad_b = nll_gradient(w, b, X, y, lam)
        if max(float(np.max(np.abs(grad_w))), abs(grad_b)) < tol:
            converged = True
            break
        step = step0
        accepted = False
        for _ in range(_MAX_HALVINGS):
            w_next = w - step * grad_w
            b_next = b - step * grad_b
            loss_next = nll_loss(w_next, b_next, X, y, lam)
            if loss_next <= loss:
                accepted = True
                break
            step /= 2.0
        if not accepted:
            break  # loss cannot be decreased further at any step size
        w, b, loss = w_next, b_next, loss_next
    else:
        grad_w, grad_b = nll_gradient(w, b, X, y, lam)
        converged = max(float(np.max(np.abs(grad_w))), abs(grad_b)) < tol

    return LogisticModel(spec=spec, weights=w, bias=b, converged=converged)
