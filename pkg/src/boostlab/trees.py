"""Weighted CART-style base learners.

Two flavours share one growing routine: classification trees with -1/+1
leaf values (weighted-majority vote, weighted Gini splits) and regression
trees with weighted-mean leaf values (weighted sum-of-squares splits).
Growth is best-first to a terminal-node budget rather than a depth budget.

Tie-breaking is deterministic everywhere: among equal split gains the
lowest feature index wins, then the lowest threshold; among equally good
leaves to expand, the earliest-created leaf wins.  Thresholds are
midpoints of consecutive distinct sorted feature values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Tree",
    "TreeConfig",
    "fit_classification_tree",
    "fit_regression_tree",
    "predict_tree",
]

_LEAF = -1


@dataclass(frozen=True)
class TreeConfig:
    """Growth limits for a base-learner tree.

    max_leaves : terminal-node budget, >= 2
    min_leaf_weight : minimum total case weight allowed in a child
    mode : "classification" or "regression"
    """

    max_leaves: int = 2
    min_leaf_weight: float = 0.0
    mode: str = "classification"

    def __post_init__(self):
        if self.max_leaves < 2:
            raise ValueError("max_leaves must be >= 2")
        if self.min_leaf_weight < 0:
            raise ValueError("min_leaf_weight must be >= 0")
        if self.mode not in ("classification", "regression"):
            raise ValueError(f"unknown tree mode {self.mode!r}")


class Tree:
    """Binary axis-aligned decision tree stored as flat node arrays.

    Internal node i routes x left when ``x[feature[i]] <= threshold[i]``.
    Leaves are marked by ``feature[i] == -1`` and carry ``value[i]``.
    Immutable after construction; safe for concurrent prediction.
    """

    def __init__(self, feature, threshold, left, right, value, n_features):
        self.feature = np.asarray(feature, dtype=np.intp)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=np.intp)
        self.right = np.asarray(right, dtype=np.intp)
        self.value = np.asarray(value, dtype=float)
        self.n_features = int(n_features)

    @property
    def n_nodes(self):
        return len(self.feature)

    @property
    def n_leaves(self):
        return int(np.sum(self.feature == _LEAF))

    def predict(self, X):
        """Leaf value reached by each row of X."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != self.n_features:
            raise ValueError(
                f"expected {self.n_features} features, got {X.shape[1]}"
            )
        node = np.zeros(X.shape[0], dtype=np.intp)
        while True:
            internal = self.feature[node] != _LEAF
            if not internal.any():
                break
            idx = np.flatnonzero(internal)
            nd = node[idx]
            go_left = X[idx, self.feature[nd]] <= self.threshold[nd]
            node[idx] = np.where(go_left, self.left[nd], self.right[nd])
        return self.value[node]

    def path_features(self):
        """Distinct features tested on each root-to-leaf path (for diagnostics)."""
        paths = []

        def walk(i, seen):
            if self.feature[i] == _LEAF:
                paths.append(seen)
                return
            walk(self.left[i], seen | {int(self.feature[i])})
            walk(self.right[i], seen | {int(self.feature[i])})

        walk(0, frozenset())
        return paths

    def __repr__(self):
        return f"Tree(n_leaves={self.n_leaves}, n_features={self.n_features})"


def _validate_inputs(X, w):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("features must be a 2-D array")
    n = X.shape[0]
    if n == 0:
        raise ValueError("cannot fit a tree on an empty dataset")
    w = np.asarray(w, dtype=float)
    if w.shape != (n,):
        raise ValueError("weights must have one entry per sample")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    if w.sum() <= 0:
        raise ValueError("degenerate weights: all zero")
    return X, w


def _best_split_gini(Xn, yn, wn, min_leaf_weight):
    """Best (gain, feature, threshold) by weighted Gini decrease, or None."""
    m = Xn.shape[0]
    if m < 2:
        return None
    order = np.argsort(Xn, axis=0, kind="stable")
    xs = np.take_along_axis(Xn, order, axis=0)
    ws = wn[order]
    wp = (wn * (yn > 0))[order]
    W = wn.sum()
    if W <= 0.0:
        # a node can carry only zero-weight samples once boosting weights
        # concentrate; it has no impurity to reduce
        return None
    P = float(wp[:, 0].sum())
    parent = 2.0 * P * (W - P) / W

    WL = np.cumsum(ws, axis=0)[:-1]
    PL = np.cumsum(wp, axis=0)[:-1]
    WR = W - WL
    PR = P - PL
    with np.errstate(divide="ignore", invalid="ignore"):
        gl = 2.0 * PL * (WL - PL) / WL
        gr = 2.0 * PR * (WR - PR) / WR
    child = np.where(WL > 0, gl, 0.0) + np.where(WR > 0, gr, 0.0)
    gain = parent - child
    valid = (xs[1:] > xs[:-1]) & (WL >= min_leaf_weight) & (WR >= min_leaf_weight)
    gain[~valid] = -np.inf
    return _argmax_split(gain, xs)


def _best_split_sse(Xn, rn, wn, min_leaf_weight):
    """Best (gain, feature, threshold) by weighted SSE reduction, or None."""
    m = Xn.shape[0]
    if m < 2 or np.all(rn == rn[0]):
        return None
    order = np.argsort(Xn, axis=0, kind="stable")
    xs = np.take_along_axis(Xn, order, axis=0)
    ws = wn[order]
    W = wn.sum()
    if W <= 0.0:
        return None
    # Center responses on the node mean: avoids cancellation in S2 - S1^2/W.
    rc = rn - float(np.dot(wn, rn)) / W
    rs = rc[order]
    s1 = np.cumsum(ws * rs, axis=0)[:-1]
    s2 = np.cumsum(ws * rs * rs, axis=0)[:-1]
    WL = np.cumsum(ws, axis=0)[:-1]
    WR = W - WL
    S1 = float(np.dot(wn, rc))
    S2 = float(np.dot(wn, rc * rc))
    with np.errstate(divide="ignore", invalid="ignore"):
        sse_l = s2 - s1 * s1 / WL
        sse_r = (S2 - s2) - (S1 - s1) ** 2 / WR
    sse_l = np.where(WL > 0, np.maximum(sse_l, 0.0), 0.0)
    sse_r = np.where(WR > 0, np.maximum(sse_r, 0.0), 0.0)
    gain = S2 - sse_l - sse_r
    valid = (xs[1:] > xs[:-1]) & (WL >= min_leaf_weight) & (WR >= min_leaf_weight)
    gain[~valid] = -np.inf
    return _argmax_split(gain, xs)


def _argmax_split(gain, xs):
    # argmax scans rows first within each column (ascending thresholds),
    # then columns (ascending features), so np.argmax's first-hit rule
    # implements the tie-break: lowest feature index, then lowest threshold.
    per_feature_row = np.argmax(gain, axis=0)
    per_feature_gain = gain[per_feature_row, np.arange(gain.shape[1])]
    j = int(np.argmax(per_feature_gain))
    g = float(per_feature_gain[j])
    if not np.isfinite(g) or g <= 0.0:
        return None
    i = int(per_feature_row[j])
    threshold = 0.5 * (xs[i, j] + xs[i + 1, j])
    return g, j, float(threshold)


def _majority_value(yn, wn):
    pos = float(wn[yn > 0].sum())
    return 1.0 if pos >= 0.5 * float(wn.sum()) else -1.0


def _mean_value(rn, wn):
    W = float(wn.sum())
    return float(np.dot(wn, rn)) / W if W > 0 else 0.0


def _grow(X, target, w, cfg, splitter, leaf_value):
    n, q = X.shape
    feature = [_LEAF]
    threshold = [0.0]
    left = [_LEAF]
    right = [_LEAF]
    value = [leaf_value(target, w)]
    idx_of = {0: np.arange(n)}
    candidates = {}

    split = splitter(X, target, w, cfg.min_leaf_weight)
    if split is not None:
        candidates[0] = split

    n_leaves = 1
    while n_leaves < cfg.max_leaves and candidates:
        # best-first: expand the leaf with the largest gain; earliest-created
        # leaf wins ties.
        node = min(candidates, key=lambda k: (-candidates[k][0], k))
        gain, j, thr = candidates.pop(node)
        idx = idx_of.pop(node)
        mask = X[idx, j] <= thr
        for child_idx in (idx[mask], idx[~mask]):
            child = len(feature)
            feature.append(_LEAF)
            threshold.append(0.0)
            left.append(_LEAF)
            right.append(_LEAF)
            value.append(leaf_value(target[child_idx], w[child_idx]))
            idx_of[child] = child_idx
            sub = splitter(
                X[child_idx], target[child_idx], w[child_idx], cfg.min_leaf_weight
            )
            if sub is not None:
                candidates[child] = sub
        right_id = len(feature) - 1
        feature[node] = j
        threshold[node] = thr
        left[node] = right_id - 1
        right[node] = right_id
        n_leaves += 1

    return Tree(feature, threshold, left, right, value, q)


def fit_classification_tree(data, weights, cfg):
    """Grow a -1/+1 leaf tree by greedy weighted-Gini splitting.

    Parameters
    ----------
    data : Dataset
        Features and -1/+1 labels.
    weights : array
        Nonnegative case weights summing to 1.
    cfg : TreeConfig with mode "classification".
    """
    if cfg.mode != "classification":
        raise ValueError("cfg.mode must be 'classification'")
    X, w = _validate_inputs(data.features, weights)
    y = np.asarray(data.labels, dtype=float)
    return _grow(X, y, w, cfg, _best_split_gini, _majority_value)


def fit_regression_tree(data, responses, weights, cfg):
    """Grow a real-leaf tree by greedy weighted-SSE splitting.

    Leaf values are the weighted means of the responses routed to them.
    """
    if cfg.mode != "regression":
        raise ValueError("cfg.mode must be 'regression'")
    X, w = _validate_inputs(data.features, weights)
    r = np.asarray(responses, dtype=float)
    if r.shape != (X.shape[0],):
        raise ValueError("responses must have one entry per sample")
    return _grow(X, r, w, cfg, _best_split_sse, _mean_value)


def predict_tree(tree, x):
    """Value of the unique leaf reached by a single feature vector."""
    return float(tree.predict(np.asarray(x, dtype=float).reshape(1, -1))[0])
