"""Scikit-learn style front end for the boosting engines.

Wraps the functional engine in a fit/predict estimator so the algorithms
compose with pipelines, grid search and the rest of the ecosystem.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .engine import BoostConfig, PenaltySpec, run_boost
from .losses import prob_from_score
from .simdata import Dataset
from .trees import TreeConfig

__all__ = ["BoostingClassifier"]


class BoostingClassifier(BaseEstimator, ClassifierMixin):
    """Tree-based boosting for two-class problems.

    Parameters
    ----------
    algo : {"adaboost", "penalized_fgd"}
        Discrete AdaBoost on -1/+1 tree classifiers, or penalized
        functional gradient descent on regression trees.
    loss : {"exponential", "bernoulli_log", "squared"}
        Surrogate loss; AdaBoost implies the exponential loss.
    penalty : {"unit", "scaled", "curvature"}
        Direction penalty for the FGD engine; "unit" is plain gradient
        boosting, "scaled" multiplies the working response by
        ``penalty_scale``, "curvature" is the Newton step.
    n_iterations : int
        Number of boosting rounds.
    step_multiplier : float
        AdaBoost step-length multiplier; 2.0 is the doubled-step variant.
    shrinkage : float
        FGD step-length factor.
    subsample_fraction : float in (0, 1]
        Per-iteration subsample drawn without replacement.
    max_leaves, min_leaf_weight : base-tree growth limits.
    random_state : int
        Seed driving the subsample draws.

    Attributes
    ----------
    ensemble_ : the fitted additive model
    curves_ : per-iteration training metrics
    classes_ : array([-1, 1])
    """

    def __init__(self, algo="adaboost", loss="exponential", penalty="unit",
                 penalty_scale=1.0, n_iterations=100, step_multiplier=1.0,
                 shrinkage=0.1, subsample_fraction=1.0, max_leaves=2,
                 min_leaf_weight=0.0, eps_clamp=1e-10, random_state=0):
        self.algo = algo
        self.loss = loss
        self.penalty = penalty
        self.penalty_scale = penalty_scale
        self.n_iterations = n_iterations
        self.step_multiplier = step_multiplier
        self.shrinkage = shrinkage
        self.subsample_fraction = subsample_fraction
        self.max_leaves = max_leaves
        self.min_leaf_weight = min_leaf_weight
        self.eps_clamp = eps_clamp
        self.random_state = random_state

    def _config(self):
        mode = "classification" if self.algo == "adaboost" else "regression"
        return BoostConfig(
            algo=self.algo,
            loss=self.loss,
            penalty=PenaltySpec(kind=self.penalty, c=self.penalty_scale),
            iterations=self.n_iterations,
            step_multiplier=self.step_multiplier,
            shrinkage=self.shrinkage,
            subsample_fraction=self.subsample_fraction,
            tree=TreeConfig(
                max_leaves=self.max_leaves,
                min_leaf_weight=self.min_leaf_weight,
                mode=mode,
            ),
            eps_clamp=self.eps_clamp,
            seed=self.random_state,
        )

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        classes = np.unique(y)
        if not np.all(np.isin(classes, (-1, 0, 1))) or len(classes) > 2:
            raise ValueError("labels must be two classes coded -1/+1 or 0/1")
        y_pm = np.where(y > 0, 1, -1)
        self.classes_ = np.array([-1, 1])
        self._zero_one = bool(np.any(y == 0))
        if self._zero_one:
            self.classes_ = np.array([0, 1])
        data = Dataset(X, y_pm)
        self.ensemble_, self.curves_ = run_boost(data, None, self._config())
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "ensemble_")
        X = check_array(X)
        return self.ensemble_.decision_function(X)

    def predict(self, X):
        # sign(0) counts as the positive class
        pos = self.decision_function(X) >= 0.0
        return np.where(pos, self.classes_[1], self.classes_[0])

    def predict_proba(self, X):
        p = prob_from_score(self.loss, self.decision_function(X))
        return np.column_stack([1.0 - p, p])
