"""Per-iteration evaluation metrics for boosting runs.

Score-based helpers operate on raw score vectors so learning curves can be
maintained incrementally; the ensemble-level wrappers evaluate the model
first.  One tie rule everywhere: sign(0) counts as class +1, matching the
p >= 0.5 classification threshold under the half-logit link.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logsumexp

__all__ = [
    "CurvePoint",
    "NLL_CLIP",
    "misclassification_rate",
    "mean_negative_log_likelihood",
    "extreme_probability_fraction",
    "probability_mse",
    "misclassification_from_scores",
    "nll_from_scores",
    "extreme_fraction_from_scores",
    "prob_mse_from_scores",
    "mean_exp_loss_from_scores",
    "curve_point_from_scores",
]

# Probability clip used only when evaluating the log-likelihood, so curves
# stay finite while divergence remains visible.
NLL_CLIP = 1e-15


@dataclass(frozen=True)
class CurvePoint:
    """One learning-curve row: metrics of one split at one iteration."""

    iteration: int
    split: str  # "train" or "holdout"
    miscl: float
    exp_loss: float
    nll: float
    prob_mse: float | None
    frac_extreme: float


def _probs(scores):
    return expit(2.0 * np.asarray(scores, dtype=float))


def misclassification_from_scores(scores, labels):
    pred = np.where(np.asarray(scores) >= 0.0, 1, -1)
    return float(np.mean(pred != np.asarray(labels)))


def nll_from_scores(scores, labels):
    p = np.clip(_probs(scores), NLL_CLIP, 1.0 - NLL_CLIP)
    ystar = (np.asarray(labels) + 1) / 2.0
    return float(np.mean(-(ystar * np.log(p) + (1.0 - ystar) * np.log(1.0 - p))))


def extreme_fraction_from_scores(scores, lo=0.01, hi=0.99):
    p = _probs(scores)
    return float(np.mean((p < lo) | (p > hi)))


def prob_mse_from_scores(scores, true_probs):
    d = _probs(scores) - np.asarray(true_probs, dtype=float)
    return float(np.mean(d * d))


def mean_exp_loss_from_scores(scores, labels):
    # log-domain mean: margins grow without bound over boosting iterations.
    m = np.asarray(labels) * np.asarray(scores, dtype=float)
    with np.errstate(over="ignore"):
        return float(np.exp(logsumexp(-m) - np.log(len(m))))


def curve_point_from_scores(iteration, split, scores, labels, true_probs=None,
                            has_link=True):
    """Assemble one CurvePoint from a score vector.

    Probability-based columns are NaN when the loss has no probability
    link; prob_mse is None when the true probabilities are unknown.
    """
    if has_link:
        nll = nll_from_scores(scores, labels)
        frac = extreme_fraction_from_scores(scores)
        pmse = None if true_probs is None else prob_mse_from_scores(scores, true_probs)
    else:
        nll, frac, pmse = float("nan"), float("nan"), None
    return CurvePoint(
        iteration=iteration,
        split=split,
        miscl=misclassification_from_scores(scores, labels),
        exp_loss=mean_exp_loss_from_scores(scores, labels),
        nll=nll,
        prob_mse=pmse,
        frac_extreme=frac,
    )


def _scores(ensemble, data):
    if data.n == 0:
        raise ValueError("dataset is empty")
    return ensemble.decision_function(data.features)


def misclassification_rate(ensemble, data):
    """Fraction of points with sign(F(x)) != y; sign(0) counts as +1."""
    return misclassification_from_scores(_scores(ensemble, data), data.labels)


def mean_negative_log_likelihood(ensemble, data):
    """Mean negative Bernoulli log-likelihood of the linked probabilities."""
    return nll_from_scores(_scores(ensemble, data), data.labels)


def extreme_probability_fraction(ensemble, data, lo=0.01, hi=0.99):
    """Fraction of points whose estimated probability falls outside [lo, hi]."""
    return extreme_fraction_from_scores(_scores(ensemble, data), lo, hi)


def probability_mse(ensemble, data):
    """Mean squared error of estimated vs true class-1 probabilities."""
    if data.true_probs is None:
        raise ValueError("dataset has no true probabilities")
    return prob_mse_from_scores(_scores(ensemble, data), data.true_probs)
