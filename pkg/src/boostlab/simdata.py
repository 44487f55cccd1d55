"""Synthetic two-class datasets with known conditional probabilities.

Two generators: a two-level model whose class-1 probability jumps between
p_lo and p_hi across an additive boundary, and a smooth additive-logit
model.  Both record the true conditional probabilities so probability
estimates can be scored against the truth.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "Dataset",
    "SimSpec",
    "gen_two_level",
    "gen_logistic_additive",
    "split_train_holdout",
    "save_csv",
    "load_csv",
]

_REAL_FMT = "%.9g"


@dataclass
class Dataset:
    """Feature matrix, -1/+1 labels and optional true class-1 probabilities."""

    features: np.ndarray
    labels: np.ndarray
    true_probs: np.ndarray | None = None

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        if self.features.ndim != 2:
            raise ValueError("features must be 2-D")
        if self.labels.shape != (self.features.shape[0],):
            raise ValueError("labels must have one entry per row")
        if not np.all(np.isin(self.labels, (-1, 1))):
            raise ValueError("labels must be -1 or +1")
        if self.true_probs is not None:
            self.true_probs = np.asarray(self.true_probs, dtype=float)
            if self.true_probs.shape != (self.features.shape[0],):
                raise ValueError("true_probs must have one entry per row")

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def q(self):
        return self.features.shape[1]

    def subset(self, idx):
        tp = None if self.true_probs is None else self.true_probs[idx]
        return Dataset(self.features[idx], self.labels[idx], tp)


@dataclass(frozen=True)
class SimSpec:
    """Parameters of a simulated dataset.

    model : "two_level" or "logistic_additive"
    n_active : number of leading features entering the boundary
    p_lo, p_hi : the two probability levels of the two-level model
    slope : steepness of the additive-logit model
    """

    model: str = "two_level"
    n: int = 1000
    q: int = 20
    n_active: int = 5
    p_lo: float = 0.1
    p_hi: float = 0.9
    slope: float = 8.0
    seed: int = 0

    def __post_init__(self):
        if self.model not in ("two_level", "logistic_additive"):
            raise ValueError(f"unknown simulation model {self.model!r}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 1 <= self.n_active <= self.q:
            raise ValueError("need 1 <= n_active <= q")
        if not 0.0 < self.p_lo <= self.p_hi < 1.0:
            raise ValueError("need 0 < p_lo <= p_hi < 1")

    def with_seed(self, seed):
        return replace(self, seed=seed)


def _draw(spec, prob_fn):
    rng = np.random.default_rng(spec.seed)
    X = rng.random((spec.n, spec.q))
    p = prob_fn(X)
    labels = np.where(rng.random(spec.n) < p, 1, -1)
    return Dataset(X, labels, p)


def gen_two_level(spec):
    """Two-level model: p(x) = p_hi when the leading-feature sum exceeds
    half its range, else p_lo.  The Bayes boundary is additive in the
    coordinates and the Bayes error is min(p_lo, 1-p_hi) on each side.
    """
    if spec.model != "two_level":
        raise ValueError("spec.model must be 'two_level'")

    def prob(X):
        s = X[:, : spec.n_active].sum(axis=1)
        return np.where(s > spec.n_active / 2.0, spec.p_hi, spec.p_lo)

    return _draw(spec, prob)


def gen_logistic_additive(spec):
    """Smooth additive model: p(x) = 1/(1 + exp(-slope * sum(x_j - 0.5)))."""
    if spec.model != "logistic_additive":
        raise ValueError("spec.model must be 'logistic_additive'")

    def prob(X):
        s = (X[:, : spec.n_active] - 0.5).sum(axis=1)
        return 1.0 / (1.0 + np.exp(-spec.slope * s))

    return _draw(spec, prob)


def generate(spec):
    """Dispatch on spec.model."""
    if spec.model == "two_level":
        return gen_two_level(spec)
    return gen_logistic_additive(spec)


def split_train_holdout(data, fraction, seed):
    """Deterministic disjoint split; train gets ceil(fraction * n) rows."""
    if data.n < 2:
        raise ValueError("need at least 2 rows to split")
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must be in (0, 1)")
    k = int(np.ceil(fraction * data.n))
    if k == 0 or k == data.n:
        raise ValueError("fraction leaves one side of the split empty")
    perm = np.random.default_rng(seed).permutation(data.n)
    train_idx = np.sort(perm[:k])
    hold_idx = np.sort(perm[k:])
    return data.subset(train_idx), data.subset(hold_idx)


def save_csv(data, path):
    """Write a dataset as ``f1,...,fq,label[,true_prob]`` with 9-digit reals."""
    with open(path, "w") as fh:
        cols = [f"f{j + 1}" for j in range(data.q)] + ["label"]
        if data.true_probs is not None:
            cols.append("true_prob")
        fh.write(",".join(cols) + "\n")
        for i in range(data.n):
            row = [_REAL_FMT % v for v in data.features[i]]
            row.append(str(int(data.labels[i])))
            if data.true_probs is not None:
                row.append(_REAL_FMT % data.true_probs[i])
            fh.write(",".join(row) + "\n")


class DatasetParseError(ValueError):
    """Malformed dataset file; carries the 1-based offending line number."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def load_csv(path):
    """Parse a dataset written by :func:`save_csv` (true_prob optional)."""
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        cols = header.split(",")
        has_probs = cols and cols[-1] == "true_prob"
        feat_cols = cols[:-2] if has_probs else cols[:-1]
        expected = [f"f{j + 1}" for j in range(len(feat_cols))] + ["label"]
        if has_probs:
            expected.append("true_prob")
        if cols != expected:
            raise DatasetParseError(1, f"unexpected header {header!r}")
        q = len(feat_cols)
        if q == 0:
            raise DatasetParseError(1, "no feature columns")

        feats, labels, probs = [], [], []
        for line_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(cols):
                raise DatasetParseError(line_no, f"expected {len(cols)} fields")
            try:
                row = [float(v) for v in parts[:q]]
            except ValueError:
                raise DatasetParseError(line_no, "non-numeric feature") from None
            if not np.all(np.isfinite(row)):
                raise DatasetParseError(line_no, "missing or non-finite feature")
            try:
                lab = float(parts[q])
            except ValueError:
                raise DatasetParseError(line_no, "non-numeric label") from None
            if lab not in (-1.0, 1.0):
                raise DatasetParseError(line_no, f"label must be -1 or 1, got {parts[q]}")
            feats.append(row)
            labels.append(int(lab))
            if has_probs:
                try:
                    p = float(parts[q + 1])
                except ValueError:
                    raise DatasetParseError(line_no, "non-numeric true_prob") from None
                if not 0.0 <= p <= 1.0 or not np.isfinite(p):
                    raise DatasetParseError(line_no, "true_prob outside [0, 1]")
                probs.append(p)
    if not feats:
        raise DatasetParseError(2, "no data rows")
    return Dataset(
        np.array(feats), np.array(labels), np.array(probs) if has_probs else None
    )
