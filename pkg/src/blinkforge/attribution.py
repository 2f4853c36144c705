"""Exact Shapley attribution over small feature sets, plus a minimal ridge
regressor so the attribution pipeline runs end to end without external
models.

The value of a coalition is the model prediction on a hybrid vector that
takes the explained instance's values on coalition members and background
values elsewhere (single-background convention). A background *set* may be
supplied instead, in which case the coalition value is the mean prediction
over the set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidArgumentError,
    InvalidInputError,
    SingularDesignError,
    TooManyFeaturesError,
)

MAX_EXACT_FEATURES = 20


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray
    intercept: float
    regularization: float = 0.0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).copy()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return X @ self.weights + self.intercept

    def predict_one(self, x) -> float:
        return float(np.dot(np.asarray(x, dtype=float), self.weights) + self.intercept)


@dataclass(frozen=True)
class ShapleyReport:
    phi: dict[str, float]
    base_value: float
    prediction: float


def fit_ridge(X, y, lam: float = 0.0) -> LinearModel:
    """Least squares with an L2 penalty on the weights only.

    Solves min ||y - Xw - b||^2 + lam * ||w||^2 via the normal equations on
    mean-centered data, which leaves the intercept unpenalized.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2:
        raise InvalidInputError("X must be 2-D")
    if y.shape != (X.shape[0],):
        raise InvalidInputError("y must be 1-D with one entry per row of X")
    if X.shape[0] < 2:
        raise InvalidInputError("need at least 2 rows")
    if lam < 0:
        raise InvalidArgumentError("regularization must be nonnegative")
    x_mean = X.mean(axis=0)
    y_mean = y.mean()
    Xc = X - x_mean
    yc = y - y_mean
    gram = Xc.T @ Xc + lam * np.eye(X.shape[1])
    try:
        w = np.linalg.solve(gram, Xc.T @ yc)
    except np.linalg.LinAlgError as exc:
        raise SingularDesignError(
            "normal equations are singular; try lam > 0"
        ) from exc
    if lam == 0.0:
        cond = np.linalg.cond(gram)
        if not np.isfinite(cond) or cond > 1e12:
            raise SingularDesignError(
                "design matrix is (numerically) singular; try lam > 0"
            )
    intercept = float(y_mean - x_mean @ w)
    return LinearModel(weights=w, intercept=intercept, regularization=lam)


def _as_vector(row: dict[str, float], features) -> np.ndarray:
    missing = [f for f in features if f not in row]
    if missing:
        raise InvalidInputError(f"row is missing features: {missing}")
    return np.array([float(row[f]) for f in features])


def shapley_exact(predict, instance: dict[str, float],
                  background, features) -> ShapleyReport:
    """Exact Shapley values by full coalition enumeration.

    ``predict`` maps a feature vector (ordered like ``features``) to a real;
    ``background`` is a single reference row or a list of rows to average
    over. All 2^n coalition values are memoized, so ``len(features)`` is
    capped at 20.
    """
    feats = list(features)
    n = len(feats)
    if n == 0:
        raise InvalidArgumentError("need at least one feature")
    if n > MAX_EXACT_FEATURES:
        raise TooManyFeaturesError(
            f"exact enumeration supports up to {MAX_EXACT_FEATURES} features, "
            f"got {n}"
        )
    x = _as_vector(instance, feats)
    if isinstance(background, dict):
        backgrounds = np.array([_as_vector(background, feats)])
    else:
        rows = list(background)
        if not rows:
            raise InvalidInputError("background set is empty")
        backgrounds = np.array([_as_vector(r, feats) for r in rows])

    values = np.empty(1 << n)
    for mask in range(1 << n):
        hybrids = backgrounds.copy()
        for i in range(n):
            if mask >> i & 1:
                hybrids[:, i] = x[i]
        values[mask] = float(np.mean([predict(h) for h in hybrids]))

    fact = [math.factorial(k) for k in range(n + 1)]
    phi = np.zeros(n)
    full = (1 << n) - 1
    for mask in range(1 << n):
        size = mask.bit_count()
        weight = fact[size] * fact[n - size - 1] / fact[n]
        for i in range(n):
            if not (mask >> i & 1):
                phi[i] += weight * (values[mask | (1 << i)] - values[mask])

    return ShapleyReport(
        phi={f: float(p) for f, p in zip(feats, phi)},
        base_value=float(values[0]),
        prediction=float(values[full]),
    )


def mean_abs_shap(reports) -> dict[str, float]:
    """Per-feature mean of |phi| across reports."""
    reports = list(reports)
    if not reports:
        raise InvalidInputError("need at least one report")
    feats = list(reports[0].phi)
    for rep in reports:
        if set(rep.phi) != set(feats):
            raise InvalidInputError("reports disagree on feature sets")
    return {
        f: float(np.mean([abs(rep.phi[f]) for rep in reports]))
        for f in feats
    }


def background_mean(X, features) -> dict[str, float]:
    """Per-feature training mean, the default Shapley background."""
    X = np.asarray(X, dtype=float)
    return {f: float(X[:, i].mean()) for i, f in enumerate(features)}
