"""Stance classifiers and the split / cross-validation protocol.

Three binary classifiers trained from scratch: full-batch gradient-descent
logistic regression, subgradient-descent linear SVM, and k-nearest
neighbors.  Decision conventions: logistic predicts 1 when w.x + b >= 0
(probability >= 0.5); the SVM predicts 1 when its decision value >= 0;
KNN breaks vote ties toward 1 and distance ties toward the lower training
index.  Features are used as-is (topic columns are 0/1 and sentiment is
bounded, so no standardization is applied).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .features import FeatureMatrix
from .validation import as_float_array, check_binary_labels, check_consistent_length

KINDS = ("logistic", "knn", "linear_svm")

_DEFAULTS = {
    "logistic": {"l2": 1.0, "learning_rate": 0.1, "epochs": 500},
    "knn": {"k": 5, "metric": "euclidean"},
    "linear_svm": {"c": 1.0, "learning_rate": 0.1, "epochs": 500},
}


@dataclass
class ClassifierSpec:
    """A classifier kind plus hyperparameters (defaults filled in)."""

    kind: str
    hyperparams: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown classifier kind: {self.kind!r}")
        defaults = dict(_DEFAULTS[self.kind])
        unknown = set(self.hyperparams) - set(defaults)
        if unknown:
            raise ValueError(
                f"hyperparameters {sorted(unknown)} do not apply to {self.kind}"
            )
        defaults.update(self.hyperparams)
        self.hyperparams = defaults


@dataclass
class EvalResult:
    """Per-fold F1 scores with their mean and sample standard deviation."""

    fold_f1: list[float]
    mean: float
    std: float

    @classmethod
    def from_folds(cls, fold_f1: list[float]) -> "EvalResult":
        arr = np.asarray(fold_f1, dtype=np.float64)
        std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
        return cls(fold_f1=[float(x) for x in fold_f1], mean=float(arr.mean()), std=std)


def _values(x) -> np.ndarray:
    if isinstance(x, FeatureMatrix):
        return x.values
    return as_float_array(x, "features", ndim=2)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500.0, 500.0)))


def logistic_loss(w: np.ndarray, b: float, x: np.ndarray, y: np.ndarray,
                  l2: float) -> float:
    """Mean cross-entropy plus (l2/2)*||w||^2; the bias is unregularized."""
    z = x @ w + b
    ce = np.logaddexp(0.0, -z) * y + np.logaddexp(0.0, z) * (1.0 - y)
    return float(ce.mean() + 0.5 * l2 * float(w @ w))


def logistic_gradient(w: np.ndarray, b: float, x: np.ndarray, y: np.ndarray,
                      l2: float) -> tuple[np.ndarray, float]:
    """Exact gradient of :func:`logistic_loss` in (w, b)."""
    residual = _sigmoid(x @ w + b) - y
    grad_w = x.T @ residual / len(y) + l2 * w
    grad_b = float(residual.mean())
    return grad_w, grad_b


class LogisticRegressionGD(BaseEstimator, ClassifierMixin):
    """Binary logistic regression by full-batch gradient descent.

    Weights start at zero, so the optimization is seed-independent; the
    seed argument is reserved for stochastic variants.
    """

    def __init__(self, l2: float = 1.0, learning_rate: float = 0.1,
                 epochs: int = 500, seed: int = 0):
        self.l2 = l2
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.seed = seed

    def fit(self, x, y) -> "LogisticRegressionGD":
        x = _values(x)
        y = check_binary_labels(y).astype(np.float64)
        check_consistent_length(x, y, names="features and labels")
        if self.l2 < 0:
            raise ValueError("l2 must be >= 0")
        w = np.zeros(x.shape[1])
        b = 0.0
        history = []
        for _ in range(self.epochs):
            history.append(logistic_loss(w, b, x, y, self.l2))
            grad_w, grad_b = logistic_gradient(w, b, x, y, self.l2)
            w -= self.learning_rate * grad_w
            b -= self.learning_rate * grad_b
        history.append(logistic_loss(w, b, x, y, self.l2))
        self.weights_ = w
        self.bias_ = b
        self.loss_history_ = history
        self.n_features_in_ = x.shape[1]
        return self

    def decision_function(self, x) -> np.ndarray:
        x = _values(x)
        if x.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected {self.n_features_in_} features, got {x.shape[1]}"
            )
        return x @ self.weights_ + self.bias_

    def predict(self, x) -> np.ndarray:
        return (self.decision_function(x) >= 0.0).astype(np.int64)


class LinearSVM(BaseEstimator, ClassifierMixin):
    """Linear SVM by subgradient descent on mean hinge loss plus
    (1/(2c))*||w||^2 (bias unregularized); zero init, seed-independent."""

    def __init__(self, c: float = 1.0, learning_rate: float = 0.1,
                 epochs: int = 500, seed: int = 0):
        self.c = c
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.seed = seed

    def fit(self, x, y) -> "LinearSVM":
        x = _values(x)
        y01 = check_binary_labels(y)
        check_consistent_length(x, y01, names="features and labels")
        if self.c <= 0:
            raise ValueError("c must be > 0")
        signs = 2.0 * y01 - 1.0
        n = len(signs)
        w = np.zeros(x.shape[1])
        b = 0.0
        for _ in range(self.epochs):
            margins = signs * (x @ w + b)
            violating = margins < 1.0
            grad_w = -(x[violating] * signs[violating, np.newaxis]).sum(axis=0) / n
            grad_w += w / self.c
            grad_b = -signs[violating].sum() / n
            w -= self.learning_rate * grad_w
            b -= self.learning_rate * grad_b
        self.weights_ = w
        self.bias_ = b
        self.n_features_in_ = x.shape[1]
        return self

    def decision_function(self, x) -> np.ndarray:
        x = _values(x)
        if x.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected {self.n_features_in_} features, got {x.shape[1]}"
            )
        return x @ self.weights_ + self.bias_

    def predict(self, x) -> np.ndarray:
        return (self.decision_function(x) >= 0.0).astype(np.int64)


class KNearestNeighbors(BaseEstimator, ClassifierMixin):
    """KNN with Euclidean distance and majority vote among the k nearest."""

    def __init__(self, k: int = 5):
        self.k = k

    def fit(self, x, y) -> "KNearestNeighbors":
        x = _values(x)
        y01 = check_binary_labels(y)
        check_consistent_length(x, y01, names="features and labels")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        self.x_train_ = x.copy()
        self.y_train_ = y01.copy()
        self.n_features_in_ = x.shape[1]
        return self

    def predict(self, x) -> np.ndarray:
        x = _values(x)
        if x.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected {self.n_features_in_} features, got {x.shape[1]}"
            )
        k = min(self.k, len(self.y_train_))
        labels = np.empty(len(x), dtype=np.int64)
        for i, point in enumerate(x):
            d2 = ((self.x_train_ - point) ** 2).sum(axis=1)
            # stable sort: equal distances resolve to the lower training index
            nearest = np.argsort(d2, kind="stable")[:k]
            votes = int(self.y_train_[nearest].sum())
            labels[i] = 1 if 2 * votes >= k else 0
        return labels


def fit_classifier(spec: ClassifierSpec, x, y, seed: int = 0):
    """Train the classifier described by ``spec``; deterministic given seed."""
    hp = spec.hyperparams
    if spec.kind == "logistic":
        model = LogisticRegressionGD(
            l2=hp["l2"], learning_rate=hp["learning_rate"],
            epochs=hp["epochs"], seed=seed,
        )
    elif spec.kind == "linear_svm":
        model = LinearSVM(
            c=hp["c"], learning_rate=hp["learning_rate"],
            epochs=hp["epochs"], seed=seed,
        )
    else:
        model = KNearestNeighbors(k=hp["k"])
    model.fit(x, y)
    model.spec_ = spec
    if isinstance(x, FeatureMatrix):
        model.feature_kind_ = x.kind
    return model


def predict(model, x) -> np.ndarray:
    return model.predict(x)


def f1_score(y_true, y_pred) -> float:
    """Binary F1 on the positive class; 0.0 when there are no true or
    predicted positives."""
    yt = check_binary_labels(y_true, "y_true")
    yp = check_binary_labels(y_pred, "y_pred")
    check_consistent_length(yt, yp, names="y_true and y_pred")
    tp = int(np.sum((yt == 1) & (yp == 1)))
    fp = int(np.sum((yt == 0) & (yp == 1)))
    fn = int(np.sum((yt == 1) & (yp == 0)))
    denom = 2 * tp + fp + fn
    return 0.0 if denom == 0 else 2 * tp / denom


def train_test_split(
    n: int, ratio: float, stratify_labels=None, seed: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Seeded train/test index split with |train| = round(ratio * n).

    With stratification, each class contributes within one sample of
    ``ratio * class_size`` to the training side.
    """
    if n < 2:
        raise ValueError("need at least 2 samples to split")
    if not 0.0 < ratio < 1.0:
        raise ValueError("ratio must lie strictly between 0 and 1")
    n_train = int(math.floor(ratio * n + 0.5))
    rng = np.random.default_rng(seed)

    if stratify_labels is None:
        perm = rng.permutation(n)
        return perm[:n_train], perm[n_train:]

    labels = np.asarray(stratify_labels)
    if labels.shape != (n,):
        raise ValueError("stratify_labels must have length n")
    class_values = sorted(np.unique(labels).tolist())
    class_indices = {}
    for value in class_values:
        idx = np.flatnonzero(labels == value)
        if len(idx) < 2:
            raise ValueError(
                f"class {value!r} has fewer than 2 members; cannot stratify"
            )
        class_indices[value] = rng.permutation(idx)

    targets = {v: ratio * len(class_indices[v]) for v in class_values}
    take = {v: int(math.floor(targets[v])) for v in class_values}
    remainder = n_train - sum(take.values())
    by_fraction = sorted(
        class_values, key=lambda v: (-(targets[v] - take[v]), v)
    )
    for v in by_fraction[:remainder]:
        take[v] += 1

    train_parts, test_parts = [], []
    for value in class_values:
        idx = class_indices[value]
        train_parts.append(idx[: take[value]])
        test_parts.append(idx[take[value]:])
    train = rng.permutation(np.concatenate(train_parts))
    test = rng.permutation(np.concatenate(test_parts))
    return train, test


def _stratified_folds(y: np.ndarray, folds: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Deal class-shuffled indices cyclically so fold sizes differ by <= 1
    overall and by <= 1 per class."""
    assignments = np.empty(len(y), dtype=np.int64)
    pointer = 0
    for value in sorted(np.unique(y).tolist()):
        idx = rng.permutation(np.flatnonzero(y == value))
        for i in idx:
            assignments[i] = pointer % folds
            pointer += 1
    return [np.flatnonzero(assignments == f) for f in range(folds)]


def cross_validate(x, y, spec: ClassifierSpec, folds: int = 10,
                   seed: int = 0) -> EvalResult:
    """Stratified k-fold cross-validation reporting per-fold F1.

    Falls back to an unstratified partition (with a warning) when some
    class is smaller than the fold count.
    """
    values = _values(x)
    y01 = check_binary_labels(y)
    check_consistent_length(values, y01, names="features and labels")
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if len(y01) < folds:
        raise ValueError("need at least as many samples as folds")
    rng = np.random.default_rng(seed)
    class_sizes = np.bincount(y01, minlength=2)
    if (class_sizes[class_sizes > 0] < folds).any():
        warnings.warn(
            "a class is smaller than the fold count; using an unstratified partition",
            stacklevel=2,
        )
        perm = rng.permutation(len(y01))
        fold_indices = [perm[f::folds] for f in range(folds)]
    else:
        fold_indices = _stratified_folds(y01, folds, rng)

    scores = []
    for f in range(folds):
        val_idx = fold_indices[f]
        train_idx = np.concatenate(
            [fold_indices[g] for g in range(folds) if g != f]
        )
        model = fit_classifier(spec, values[train_idx], y01[train_idx], seed=seed)
        scores.append(f1_score(y01[val_idx], model.predict(values[val_idx])))
    return EvalResult.from_folds(scores)
