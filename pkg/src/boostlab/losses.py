"""Surrogate loss functions for two-class margin classification.

Scores F live on the half-logit scale: the implied class-1 probability is
p = 1 / (1 + exp(-2F)).  Labels are coded -1/+1 throughout.  Every loss
exposes its value, first and second derivative with respect to the score,
vectorized over samples.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit, logsumexp

__all__ = [
    "Loss",
    "ExponentialLoss",
    "BernoulliLogLoss",
    "SquaredLoss",
    "UnsupportedLinkError",
    "get_loss",
    "evaluate_derivatives",
    "prob_from_score",
    "ensemble_risk",
]


class UnsupportedLinkError(ValueError):
    """Raised when a loss has no score-to-probability link."""


class Loss:
    """Base class for margin losses.

    Subclasses implement :meth:`evaluate`, returning the per-sample loss
    value, gradient and curvature (first and second partials w.r.t. the
    score).  All losses are pure and stateless.
    """

    name = ""
    has_prob_link = False

    def evaluate(self, y, F):
        """Return ``(value, grad, curv)`` arrays at labels ``y`` and scores ``F``."""
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}()"


class ExponentialLoss(Loss):
    """exp(-y*F); the loss AdaBoost descends on."""

    name = "exponential"
    has_prob_link = True

    def evaluate(self, y, F):
        y = np.asarray(y, dtype=float)
        F = np.asarray(F, dtype=float)
        value = np.exp(-y * F)
        return value, -y * value, value


class BernoulliLogLoss(Loss):
    """log(1 + exp(-2*y*F)): the negative Bernoulli log-likelihood.

    The factor 2 in the exponent keeps the score on the half-logit scale
    shared with the exponential loss, so both losses use the same
    probability link.
    """

    name = "bernoulli_log"
    has_prob_link = True

    def evaluate(self, y, F):
        y = np.asarray(y, dtype=float)
        F = np.asarray(F, dtype=float)
        value = np.logaddexp(0.0, -2.0 * y * F)
        p = expit(2.0 * F)
        ystar = (y + 1.0) / 2.0
        grad = -2.0 * (ystar - p)
        curv = 4.0 * p * (1.0 - p)
        return value, grad, curv


class SquaredLoss(Loss):
    """(y - F)**2; no probability link."""

    name = "squared"
    has_prob_link = False

    def evaluate(self, y, F):
        y = np.asarray(y, dtype=float)
        F = np.asarray(F, dtype=float)
        r = y - F
        return r * r, -2.0 * r, np.full_like(r, 2.0)


_LOSSES = {cls.name: cls for cls in (ExponentialLoss, BernoulliLogLoss, SquaredLoss)}


def get_loss(name):
    """Return a loss instance by name, passing instances through unchanged."""
    if isinstance(name, Loss):
        return name
    try:
        return _LOSSES[name]()
    except KeyError:
        raise ValueError(
            f"unknown loss {name!r}; expected one of {sorted(_LOSSES)}"
        ) from None


def evaluate_derivatives(loss, y, F):
    """Scalar loss evaluation with argument validation.

    Parameters
    ----------
    loss : Loss or str
    y : int
        Label in {-1, +1}.
    F : float
        Finite score.

    Returns
    -------
    (value, grad, curv) : tuple of floats
    """
    loss = get_loss(loss)
    if y not in (-1, 1):
        raise ValueError(f"label must be -1 or +1, got {y!r}")
    F = float(F)
    if not np.isfinite(F):
        raise ValueError(f"score must be finite, got {F!r}")
    value, grad, curv = loss.evaluate(np.array([float(y)]), np.array([F]))
    return float(value[0]), float(grad[0]), float(curv[0])


def prob_from_score(loss, F):
    """Map scores to class-1 probabilities via p = 1 / (1 + exp(-2F)).

    Raises :class:`UnsupportedLinkError` for losses without a link.
    """
    loss = get_loss(loss)
    if not loss.has_prob_link:
        raise UnsupportedLinkError(f"loss {loss.name!r} has no probability link")
    return expit(2.0 * np.asarray(F, dtype=float))


def ensemble_risk(loss, ensemble, data):
    """Mean loss and log total exponential-scale loss of an ensemble.

    Returns ``(mean_loss, log_total_loss)``.  For the exponential loss the
    total is accumulated in the log domain (margins grow linearly with the
    number of boosting terms, so the raw sum overflows); for other losses
    the log of the plain sum is reported.
    """
    loss = get_loss(loss)
    if data.n == 0:
        raise ValueError("dataset is empty")
    F = ensemble.decision_function(data.features)
    y = data.labels.astype(float)
    with np.errstate(over="ignore"):
        value, _, _ = loss.evaluate(y, F)
    mean_loss = float(np.mean(value))
    if isinstance(loss, ExponentialLoss):
        log_total = float(logsumexp(-y * F))
    else:
        log_total = float(np.log(np.sum(value)))
    return mean_loss, log_total
