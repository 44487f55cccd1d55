"""Independent brute-force verifiers.

These deliberately avoid the fast code paths they are used to check: the
line search is a plain golden-section minimizer, derivatives come from
central differences, and the stump search enumerates every candidate
split by direct summation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .losses import get_loss
from .trees import Tree

__all__ = [
    "LineSearchResult",
    "numeric_line_search",
    "finite_difference_derivatives",
    "exhaustive_best_stump",
    "exhaustive_steepest_stump",
    "count_stump_candidates",
]

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class LineSearchResult:
    t_star: float
    value: float
    evaluations: int


def numeric_line_search(loss, scores, labels, direction, bracket=(-10.0, 10.0),
                        tol=1e-8, max_expansions=60):
    """Golden-section minimizer of t -> sum loss(y_i, F_i + t * g_i).

    The bracket doubles outward while the total-loss derivative at an
    endpoint still points downhill past it.  Counts objective evaluations.
    """
    loss = get_loss(loss)
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=float)
    direction = np.asarray(direction, dtype=float)
    if not np.any(direction != 0.0):
        raise ValueError("direction must not be all zero")

    n_eval = 0

    def total(t):
        nonlocal n_eval
        n_eval += 1
        value, _, _ = loss.evaluate(labels, scores + t * direction)
        s = float(np.sum(value))
        if not np.isfinite(s):
            raise ValueError(f"non-finite loss at t={t}")
        return s

    def dtotal(t):
        _, grad, _ = loss.evaluate(labels, scores + t * direction)
        return float(np.dot(grad, direction))

    lo, hi = float(bracket[0]), float(bracket[1])
    for _ in range(max_expansions):
        if dtotal(lo) <= 0.0:
            break
        lo = 2.0 * lo - hi
    for _ in range(max_expansions):
        if dtotal(hi) >= 0.0:
            break
        hi = 2.0 * hi - lo

    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = total(c), total(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = total(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = total(d)
    t_star = 0.5 * (a + b)
    return LineSearchResult(t_star=t_star, value=total(t_star), evaluations=n_eval)


def finite_difference_derivatives(loss, y, F, h=1e-5):
    """Central-difference first and second derivative of the loss in F."""
    if h <= 0:
        raise ValueError("h must be positive")
    loss = get_loss(loss)
    y_arr = np.array([float(y)])

    def val(f):
        return float(loss.evaluate(y_arr, np.array([f]))[0][0])

    grad_fd = (val(F + h) - val(F - h)) / (2.0 * h)
    curv_fd = (val(F + h) - 2.0 * val(F) + val(F - h)) / (h * h)
    return grad_fd, curv_fd


def _stump(feature, threshold, left_value, right_value, n_features):
    return Tree(
        feature=[feature, -1, -1],
        threshold=[threshold, 0.0, 0.0],
        left=[1, -1, -1],
        right=[2, -1, -1],
        value=[0.0, left_value, right_value],
        n_features=n_features,
    )


def _leaf(value, n_features):
    return Tree([-1], [0.0], [-1], [-1], [value], n_features)


def _midpoints(col):
    v = np.unique(col)
    return (v[:-1] + v[1:]) / 2.0


def count_stump_candidates(X):
    """Size of the enumerated direction class: per feature, (distinct
    midpoints + 1) thresholds times 2 polarities, plus the 2 constants."""
    X = np.asarray(X, dtype=float)
    total = 2
    for j in range(X.shape[1]):
        total += (len(_midpoints(X[:, j])) + 1) * 2
    return total


def _weighted_error(pred, y, w):
    return float(w[pred != y].sum())


def exhaustive_best_stump(data, weights, criterion="gini"):
    """Enumerate every stump (plus the two constants) and return the best.

    criterion "gini" reproduces the tree module's split rule by direct
    recomputation (the cross-check the greedy scanner is validated
    against); criterion "error" minimizes the weighted misclassification
    error of the majority-labelled stump.  Either way the stump's weighted
    error is returned alongside it.  Tie rule shared with the tree module:
    no-split beats any split it ties with, then lowest feature index, then
    lowest threshold.
    """
    X = np.asarray(data.features, dtype=float)
    y = np.asarray(data.labels)
    w = np.asarray(weights, dtype=float)
    n, q = X.shape
    if n == 0:
        raise ValueError("dataset is empty")
    W = w.sum()
    P = float(w[y == 1].sum())

    def majority(mask):
        wm = float(w[mask].sum())
        pm = float(w[mask & (y == 1)].sum())
        return 1.0 if pm >= 0.5 * wm else -1.0

    const_value = 1.0 if P >= 0.5 * W else -1.0
    best_tree = _leaf(const_value, q)
    const_pred = np.full(n, const_value)
    if criterion == "gini":
        best_score = 0.0  # gain of not splitting
    elif criterion == "error":
        best_score = _weighted_error(const_pred, y, w)
    else:
        raise ValueError(f"unknown criterion {criterion!r}")
    parent_gini = 2.0 * P * (W - P) / W if W > 0 else 0.0

    for j in range(q):
        for thr in _midpoints(X[:, j]):
            mask = X[:, j] <= thr
            lv, rv = majority(mask), majority(~mask)
            if criterion == "gini":
                wl, pl = float(w[mask].sum()), float(w[mask & (y == 1)].sum())
                wr, pr = W - wl, P - pl
                child = 0.0
                if wl > 0:
                    child += 2.0 * pl * (wl - pl) / wl
                if wr > 0:
                    child += 2.0 * pr * (wr - pr) / wr
                gain = parent_gini - child
                if gain > best_score:
                    best_score = gain
                    best_tree = _stump(j, float(thr), lv, rv, q)
            else:
                pred = np.where(mask, lv, rv)
                err = _weighted_error(pred, y, w)
                if err < best_score:
                    best_score = err
                    best_tree = _stump(j, float(thr), lv, rv, q)

    err = _weighted_error(best_tree.predict(X), y, w)
    return best_tree, err


def exhaustive_steepest_stump(X, grads):
    """Stump minimizing the directional derivative sum(grads * g(x)).

    Enumerates the same candidate class as :func:`exhaustive_best_stump`
    with the same tie rule; leaf signs are chosen to make each region's
    contribution most negative (ties resolve to +1).
    """
    X = np.asarray(X, dtype=float)
    g = np.asarray(grads, dtype=float)
    n, q = X.shape

    def region_sign(mask):
        # minimizing s * sum(g in region) picks s = -sign(sum); tie -> +1
        return -1.0 if g[mask].sum() > 0.0 else 1.0

    all_mask = np.ones(n, dtype=bool)
    cv = region_sign(all_mask)
    best_tree = _leaf(cv, q)
    best_score = float(cv * g.sum())
    for j in range(q):
        for thr in _midpoints(X[:, j]):
            mask = X[:, j] <= thr
            lv, rv = region_sign(mask), region_sign(~mask)
            score = float(lv * g[mask].sum() + rv * g[~mask].sum())
            if score < best_score:
                best_score = score
                best_tree = _stump(j, float(thr), lv, rv, q)
    return best_tree, best_score
