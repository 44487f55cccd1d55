"""Boosting engines.

Two step rules over tree base learners:

* discrete AdaBoost with a step-length multiplier ``step_multiplier``
  (1.0 is the standard algorithm; 2.0 overshoots the line search so that
  the total exponential loss stays constant across iterations);
* penalized functional gradient descent, where the quadratic penalty on
  the fitted direction selects the algorithm -- a unit penalty gives
  least-squares gradient boosting, a scaled penalty gives step-size
  shrinkage, and a curvature penalty gives Newton descent (weighted least
  squares on the ratio of first to second derivatives).

Score convention: internal scores F live on the exp(-y*F) margin scale,
so the AdaBoost coefficient is (lambda/2)*log((1-eps)/eps).  Conventions
that carry the 1/2 inside the loss instead quote coefficients exactly
twice as large; the conversion happens here, once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from . import metrics
from .losses import get_loss
from .trees import Tree, TreeConfig, fit_classification_tree, fit_regression_tree

__all__ = [
    "Ensemble",
    "PenaltySpec",
    "BoostConfig",
    "BoostState",
    "RUNNING",
    "STOPPED_PERFECT_FIT",
    "STOPPED_NO_DESCENT",
    "CurvatureError",
    "init_state",
    "adaboost_step",
    "penalized_fgd_step",
    "run_boost",
]

RUNNING = "running"
STOPPED_PERFECT_FIT = "stopped_perfect_fit"
STOPPED_NO_DESCENT = "stopped_no_descent"

_REAL_FMT = "%.9g"


class CurvatureError(ValueError):
    """Second derivatives unusable for a Newton step."""


class Ensemble:
    """Additive model: offset plus (coefficient, tree) terms.

    Immutable once built; evaluation is thread-safe.
    """

    def __init__(self, offset, terms=()):
        self.offset = float(offset)
        self.terms = tuple(terms)

    @property
    def n_terms(self):
        return len(self.terms)

    def decision_function(self, X):
        X = np.asarray(X, dtype=float)
        F = np.full(X.shape[0], self.offset)
        for coef, tree in self.terms:
            F += coef * tree.predict(X)
        return F

    def to_text(self):
        """Serialize to the structured text format (9-significant-digit reals).

        Trees are written as preorder node lists; child fields reference
        positions in that list.
        """
        lines = ["boostlab-ensemble 1"]
        lines.append("offset " + _REAL_FMT % self.offset)
        lines.append(f"terms {len(self.terms)}")
        for coef, tree in self.terms:
            lines.append("term " + _REAL_FMT % coef)
            order, pos = [], {}

            def visit(i):
                pos[i] = len(order)
                order.append(i)
                if tree.feature[i] >= 0:
                    visit(tree.left[i])
                    visit(tree.right[i])

            visit(0)
            lines.append(f"tree {len(order)} {tree.n_features}")
            for i in order:
                if tree.feature[i] >= 0:
                    lines.append(
                        "split %d %s %d %d"
                        % (
                            tree.feature[i],
                            _REAL_FMT % tree.threshold[i],
                            pos[tree.left[i]],
                            pos[tree.right[i]],
                        )
                    )
                else:
                    lines.append("leaf " + _REAL_FMT % tree.value[i])
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        it = iter(lines)

        def expect(prefix):
            ln = next(it)
            if not ln.startswith(prefix):
                raise ValueError(f"expected {prefix!r}, got {ln!r}")
            return ln[len(prefix):].split()

        if next(it).strip() != "boostlab-ensemble 1":
            raise ValueError("not a boostlab ensemble document")
        offset = float(expect("offset")[0])
        n_terms = int(expect("terms")[0])
        terms = []
        for _ in range(n_terms):
            coef = float(expect("term")[0])
            n_nodes, n_features = (int(v) for v in expect("tree"))
            feat, thr, left, right, value = [], [], [], [], []
            for _ in range(n_nodes):
                parts = next(it).split()
                if parts[0] == "split":
                    feat.append(int(parts[1]))
                    thr.append(float(parts[2]))
                    left.append(int(parts[3]))
                    right.append(int(parts[4]))
                    value.append(0.0)
                elif parts[0] == "leaf":
                    feat.append(-1)
                    thr.append(0.0)
                    left.append(-1)
                    right.append(-1)
                    value.append(float(parts[1]))
                else:
                    raise ValueError(f"unknown node kind {parts[0]!r}")
            terms.append((coef, Tree(feat, thr, left, right, value, n_features)))
        return cls(offset, terms)


@dataclass(frozen=True)
class PenaltySpec:
    """Quadratic penalty on the fitted direction.

    kind : "unit", "scaled" or "curvature"
    c : scale of the "scaled" penalty (the penalty is sum g^2 / (2c),
        so small c shrinks the fitted step).
    """

    kind: str = "unit"
    c: float = 1.0

    def __post_init__(self):
        if self.kind not in ("unit", "scaled", "curvature"):
            raise ValueError(f"unknown penalty kind {self.kind!r}")
        if self.c <= 0:
            raise ValueError("penalty scale c must be positive")


@dataclass(frozen=True)
class BoostConfig:
    """Full configuration of one boosting run."""

    algo: str = "adaboost"  # "adaboost" or "penalized_fgd"
    loss: str = "exponential"
    penalty: PenaltySpec = field(default_factory=PenaltySpec)
    iterations: int = 100
    step_multiplier: float = 1.0  # AdaBoost step-length multiplier
    shrinkage: float = 0.1  # FGD step-length factor nu
    subsample_fraction: float = 1.0
    tree: TreeConfig = field(default_factory=TreeConfig)
    eps_clamp: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.algo not in ("adaboost", "penalized_fgd"):
            raise ValueError(f"unknown algo {self.algo!r}")
        get_loss(self.loss)
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.step_multiplier <= 0:
            raise ValueError("step_multiplier must be positive")
        if self.shrinkage <= 0:
            raise ValueError("shrinkage must be positive")
        if not 0.0 < self.subsample_fraction <= 1.0:
            raise ValueError("subsample_fraction must be in (0, 1]")
        if not 0.0 < self.eps_clamp < 0.5:
            raise ValueError("eps_clamp must be in (0, 0.5)")
        expected_mode = "classification" if self.algo == "adaboost" else "regression"
        if self.tree.mode != expected_mode:
            raise ValueError(
                f"algo {self.algo!r} requires tree mode {expected_mode!r}"
            )


@dataclass
class BoostState:
    """Mutable per-run state: scores, weights and the accumulated terms."""

    scores: np.ndarray
    weights: np.ndarray
    offset: float = 0.0
    iteration: int = 0
    last_eps: float = float("nan")
    last_alpha: float = float("nan")
    status: str = RUNNING
    terms: list = field(default_factory=list)

    def ensemble(self):
        return Ensemble(self.offset, self.terms)


def _normalized_exp_weights(margins):
    logw = -margins
    return np.exp(logw - logsumexp(logw))


def init_state(data, cfg):
    """Starting scores and weights.

    AdaBoost starts at F = 0 with uniform weights.  Penalized FGD starts
    at the constant score minimizing the total loss; if only one class is
    present the fit is already perfect and the run stops immediately.
    """
    if data.n == 0:
        raise ValueError("dataset is empty")
    n = data.n
    y = data.labels
    if cfg.algo == "adaboost":
        return BoostState(
            scores=np.zeros(n), weights=np.full(n, 1.0 / n), offset=0.0
        )

    n_pos = int(np.sum(y == 1))
    n_neg = n - n_pos
    loss = get_loss(cfg.loss)
    if loss.name == "squared":
        offset = float(np.mean(y))
    elif n_pos == 0 or n_neg == 0:
        return BoostState(
            scores=np.zeros(n),
            weights=np.full(n, 1.0 / n),
            offset=0.0,
            status=STOPPED_PERFECT_FIT,
        )
    else:
        # Exponential and Bernoulli log-loss share the same constant
        # minimizer, half the logit of the positive fraction.
        offset = 0.5 * float(np.log(n_pos / n_neg))
    return BoostState(
        scores=np.full(n, offset), weights=np.full(n, 1.0 / n), offset=offset
    )


def _subsample_indices(n, cfg, iteration):
    if cfg.subsample_fraction >= 1.0:
        return np.arange(n)
    k = max(1, int(np.ceil(cfg.subsample_fraction * n)))
    rng = np.random.default_rng([cfg.seed, iteration])
    return np.sort(rng.choice(n, size=k, replace=False))


def _require_running(state):
    if state.status != RUNNING:
        raise RuntimeError(f"boosting already stopped ({state.status})")


def adaboost_step(state, data, cfg):
    """One discrete AdaBoost iteration.

    Fits a -1/+1 tree to the current weights, measures its weighted error
    eps, steps by alpha = (lambda/2) * log((1-eps)/eps), and recomputes
    the weights from the margins in the log domain.  eps is clamped below
    at eps_clamp before the coefficient is formed (a numerical guard
    against unbounded steps; set eps_clamp near the underflow threshold to
    make the step the exact line-search minimizer).  A perfect direction
    (eps exactly 0) is recorded with the capped coefficient
    (lambda/2) * log((1-eps_clamp)/eps_clamp) and stops the run; an
    uninformative one (eps >= 1/2) stops without a term.
    """
    _require_running(state)
    if cfg.algo != "adaboost":
        raise ValueError("cfg.algo must be 'adaboost'")
    y = data.labels
    idx = _subsample_indices(data.n, cfg, state.iteration)
    w_sub = state.weights[idx]
    total = w_sub.sum()
    if total <= 0:
        raise ValueError("degenerate weights on the subsample")
    w_sub = w_sub / total

    tree = fit_classification_tree(data.subset(idx), w_sub, cfg.tree)
    # eps is measured on the full weight vector even when the tree was fit
    # on a subsample, so alpha stays the full-loss line-search minimizer
    pred = tree.predict(data.features)
    eps_raw = float(state.weights[pred != y].sum())

    if eps_raw >= 0.5:
        state.status = STOPPED_NO_DESCENT
        state.last_eps = eps_raw
        state.last_alpha = 0.0
        return state

    lam = cfg.step_multiplier
    if eps_raw == 0.0:
        # cap the otherwise-infinite coefficient and stop
        eps = cfg.eps_clamp
        state.status = STOPPED_PERFECT_FIT
    else:
        # numerical guard: an eps below the clamp would produce an
        # arbitrarily large coefficient
        eps = max(eps_raw, cfg.eps_clamp)
    alpha = 0.5 * lam * np.log((1.0 - eps) / eps)

    state.terms.append((alpha, tree))
    state.scores = state.scores + alpha * pred
    state.weights = _normalized_exp_weights(y * state.scores)
    state.iteration += 1
    state.last_eps = eps_raw
    state.last_alpha = alpha
    return state


def penalized_fgd_step(state, data, cfg):
    """One penalized functional-gradient-descent iteration.

    The penalty picks the working response and case weights handed to the
    regression tree: unit -> (-grad, uniform); scaled(c) -> (-c*grad,
    uniform); curvature -> (-grad/curv, curv) -- the Newton step.  The
    fitted tree is added with the shrinkage factor as its coefficient.
    """
    _require_running(state)
    if cfg.algo != "penalized_fgd":
        raise ValueError("cfg.algo must be 'penalized_fgd'")
    loss = get_loss(cfg.loss)
    idx = _subsample_indices(data.n, cfg, state.iteration)
    y_sub = data.labels[idx].astype(float)
    _, grad, curv = loss.evaluate(y_sub, state.scores[idx])

    kind = cfg.penalty.kind
    m = len(idx)
    if kind == "unit":
        resp, cw = -grad, np.full(m, 1.0 / m)
    elif kind == "scaled":
        resp, cw = -cfg.penalty.c * grad, np.full(m, 1.0 / m)
    else:
        if not np.all(np.isfinite(curv)) or np.any(curv <= 0.0):
            raise CurvatureError(
                "second derivatives must be finite and positive for a Newton step"
            )
        resp = -grad / curv
        cw = curv / curv.sum()

    tree = fit_regression_tree(data.subset(idx), resp, cw, cfg.tree)
    nu = cfg.shrinkage
    state.terms.append((nu, tree))
    state.scores = state.scores + nu * tree.predict(data.features)
    state.iteration += 1
    return state


def run_boost(data, holdout, cfg):
    """Run a full boosting trajectory and record learning curves.

    Returns ``(ensemble, curves)`` where curves holds one CurvePoint per
    recorded iteration and split (holdout rows only when a holdout set is
    given).  Deterministic given the config; subsample draws depend only
    on (seed, iteration).
    """
    if data.n == 0:
        raise ValueError("training dataset is empty")
    has_holdout = holdout is not None and holdout.n > 0
    loss = get_loss(cfg.loss)
    step = adaboost_step if cfg.algo == "adaboost" else penalized_fgd_step

    state = init_state(data, cfg)
    hold_scores = (
        np.full(holdout.n, state.offset) if has_holdout else None
    )
    curves = []
    for _ in range(cfg.iterations):
        if state.status != RUNNING:
            break
        n_before = len(state.terms)
        step(state, data, cfg)
        if len(state.terms) == n_before:
            break  # stopped without appending a term
        coef, tree = state.terms[-1]
        curves.append(
            metrics.curve_point_from_scores(
                state.iteration, "train", state.scores, data.labels,
                data.true_probs, loss.has_prob_link,
            )
        )
        if has_holdout:
            hold_scores = hold_scores + coef * tree.predict(holdout.features)
            curves.append(
                metrics.curve_point_from_scores(
                    state.iteration, "holdout", hold_scores, holdout.labels,
                    holdout.true_probs, loss.has_prob_link,
                )
            )
    return state.ensemble(), curves
