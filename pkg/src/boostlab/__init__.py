"""boostlab: boosting algorithms as penalized functional gradient descent.

Discrete AdaBoost (with an adjustable step-length multiplier), gradient
boosting, shrinkage and Newton descent over CART-style trees, plus the
simulation experiments that probe their overfitting behaviour.
"""

from .engine import (
    BoostConfig,
    BoostState,
    Ensemble,
    PenaltySpec,
    adaboost_step,
    init_state,
    penalized_fgd_step,
    run_boost,
)
from .estimators import BoostingClassifier
from .losses import (
    BernoulliLogLoss,
    ExponentialLoss,
    SquaredLoss,
    ensemble_risk,
    evaluate_derivatives,
    get_loss,
    prob_from_score,
)
from .simdata import (
    Dataset,
    SimSpec,
    gen_logistic_additive,
    gen_two_level,
    load_csv,
    save_csv,
    split_train_holdout,
)
from .trees import Tree, TreeConfig, fit_classification_tree, fit_regression_tree

__version__ = "0.1.0"

__all__ = [
    "BoostConfig",
    "BoostState",
    "BoostingClassifier",
    "BernoulliLogLoss",
    "Dataset",
    "Ensemble",
    "ExponentialLoss",
    "PenaltySpec",
    "SimSpec",
    "SquaredLoss",
    "Tree",
    "TreeConfig",
    "adaboost_step",
    "ensemble_risk",
    "evaluate_derivatives",
    "fit_classification_tree",
    "fit_regression_tree",
    "gen_logistic_additive",
    "gen_two_level",
    "get_loss",
    "init_state",
    "load_csv",
    "penalized_fgd_step",
    "prob_from_score",
    "run_boost",
    "save_csv",
    "split_train_holdout",
]
