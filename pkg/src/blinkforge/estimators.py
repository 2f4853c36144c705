"""scikit-learn compatible wrappers around the bound-search classifier and
the ridge regressor, so both compose with pipelines, grid search, and
cloning.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from . import attribution, cull_search
from .errors import InvalidInputError
from .validation import check_X, check_X_y


class CullBoundClassifier(BaseEstimator, ClassifierMixin):
    """Interval classifier trained by bound search.

    ``fit`` learns one [lower, upper] interval per feature; ``predict``
    returns 1 (blink) where a sample lies inside every interval and 0
    otherwise.

    Parameters
    ----------
    strategy : {"bfs", "individual"}
        "bfs" explores the joint bound grid exhaustively (cost exponential
        in the feature count); "individual" optimizes each feature's bounds
        in isolation and compiles them.
    bins : int
        Grid resolution per feature.
    feature_names : sequence of str, optional
        Column names; auto-generated when omitted.
    """

    def __init__(self, strategy: str = "bfs", bins: int = 15, feature_names=None):
        self.strategy = strategy
        self.bins = bins
        self.feature_names = feature_names

    def _names(self, n_features: int) -> list[str]:
        if self.feature_names is None:
            return [f"feature_{i}" for i in range(n_features)]
        names = list(self.feature_names)
        if len(names) != n_features:
            raise InvalidInputError(
                f"{len(names)} feature names for {n_features} columns"
            )
        return names

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        y = y.astype(bool)
        names = self._names(X.shape[1])
        table = cull_search.FeatureTable.from_arrays(names, X, y)
        if self.strategy == "bfs":
            config, report = cull_search.bfs_search(table, names, bins=self.bins)
        elif self.strategy == "individual":
            config, report = cull_search.individual_search_all(
                table, names, bins=self.bins)
        else:
            raise InvalidInputError(
                f"strategy must be 'bfs' or 'individual', got {self.strategy!r}"
            )
        self.feature_names_ = names
        self.config_ = config
        self.report_ = report
        self.classes_ = np.array([0, 1])
        return self

    def predict(self, X):
        check_is_fitted(self, "config_")
        X = check_X(X)
        if X.shape[1] != len(self.feature_names_):
            raise InvalidInputError(
                f"X has {X.shape[1]} columns, expected {len(self.feature_names_)}"
            )
        pred = np.ones(X.shape[0], dtype=bool)
        for i, name in enumerate(self.feature_names_):
            lo, hi = self.config_.bounds[name]
            pred &= (X[:, i] >= lo) & (X[:, i] <= hi)
        return pred.astype(int)


class RidgeRegressor(BaseEstimator, RegressorMixin):
    """Linear least squares with an L2 penalty on the weights only."""

    def __init__(self, alpha: float = 0.0):
        self.alpha = alpha

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        model = attribution.fit_ridge(X, y.astype(float), lam=self.alpha)
        self.model_ = model
        self.coef_ = np.asarray(model.weights)
        self.intercept_ = model.intercept
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        X = check_X(X)
        return self.model_.predict(X)
