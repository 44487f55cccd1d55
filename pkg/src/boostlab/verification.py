"""Self-check suite behind the ``verify`` CLI subcommand.

Each check cross-validates a fast code path against an independent
brute-force oracle and returns (name, passed, detail).  The suite is a
compact runtime version of the test suite's core identities.
"""

from __future__ import annotations

import numpy as np

from . import oracle
from .engine import BoostConfig, RUNNING, adaboost_step, init_state, run_boost
from .losses import get_loss
from .simdata import Dataset, SimSpec, gen_two_level
from .trees import TreeConfig, fit_classification_tree

__all__ = ["run_checks", "verify"]


def _random_dataset(rng, n, q):
    X = rng.random((n, q))
    y = rng.choice([-1, 1], size=n)
    if np.all(y == y[0]):
        y[0] = -y[0]
    return Dataset(X, y)


def _check_finite_differences():
    worst = 0.0
    for name in ("exponential", "bernoulli_log", "squared"):
        loss = get_loss(name)
        for y in (-1.0, 1.0):
            for F in np.linspace(-10, 10, 41):
                _, g, c = loss.evaluate(np.array([y]), np.array([F]))
                g_fd, c_fd = oracle.finite_difference_derivatives(loss, y, F)
                worst = max(
                    worst,
                    abs(g[0] - g_fd) / max(1.0, abs(g[0])),
                    abs(c[0] - c_fd) / max(1.0, abs(c[0])) * 1e-2,
                )
    # grad tolerance 1e-6; curv tolerance 1e-4 folded in via the 1e-2 factor
    return worst <= 1e-6, f"worst scaled deviation {worst:.2e}"


def _check_line_search():
    rng = np.random.default_rng(20240811)
    worst = 0.0
    cfg = BoostConfig(algo="adaboost", iterations=1,
                      tree=TreeConfig(max_leaves=2, mode="classification"))
    for _ in range(20):
        data = _random_dataset(rng, 30, 3)
        state = init_state(data, cfg)
        # advance a few iterations so the check runs off non-uniform weights
        for _ in range(rng.integers(1, 4)):
            if state.status != RUNNING:
                break
            adaboost_step(state, data, cfg)
        if not state.terms:
            continue
        alpha, tree = state.terms[-1]
        before = state.scores - alpha * tree.predict(data.features)
        res = oracle.numeric_line_search(
            "exponential", before, data.labels, tree.predict(data.features)
        )
        worst = max(worst, abs(res.t_star - alpha))
    return worst <= 1e-6, f"worst |alpha - t*| = {worst:.2e}"


def _check_stump_equivalence():
    rng = np.random.default_rng(7)
    for i in range(20):
        data = _random_dataset(rng, int(rng.integers(5, 41)), int(rng.integers(1, 6)))
        w = rng.random(data.n)
        w /= w.sum()
        tree = fit_classification_tree(
            data, w, TreeConfig(max_leaves=2, mode="classification")
        )
        ref, _ = oracle.exhaustive_best_stump(data, w, criterion="gini")
        same = (
            tree.n_nodes == ref.n_nodes
            and np.array_equal(tree.feature, ref.feature)
            and np.allclose(tree.threshold, ref.threshold)
            and np.array_equal(tree.value[tree.feature == -1],
                               ref.value[ref.feature == -1])
        )
        if not same:
            return False, f"instance {i}: greedy stump differs from enumeration"
    return True, "20/20 instances agree"


def _check_loss_ratio():
    data = gen_two_level(SimSpec(model="two_level", n=200, seed=3))
    worst = 0.0
    for lam in (1.0, 2.0):
        # the identity belongs to the unclamped step, so park the numerical
        # guard at the underflow threshold where it can never bind
        cfg = BoostConfig(
            algo="adaboost", iterations=30, step_multiplier=lam,
            eps_clamp=1e-300,
            tree=TreeConfig(max_leaves=8, mode="classification"),
        )
        state = init_state(data, cfg)
        margins = data.labels * state.scores
        from scipy.special import logsumexp

        log_z = logsumexp(-margins)
        while state.status == RUNNING and state.iteration < cfg.iterations:
            adaboost_step(state, data, cfg)
            if not state.terms or state.status == "stopped_no_descent":
                break
            eps = state.last_eps
            new_log_z = logsumexp(-(data.labels * state.scores))
            # identity holds only while eps is interior; compare in the log
            # domain so tiny eps cannot overflow the expected ratio
            if cfg.eps_clamp < eps < 0.5:
                log_k = np.log1p(-eps) - np.log(eps)
                log_r = np.logaddexp(np.log1p(-eps) - 0.5 * lam * log_k,
                                     np.log(eps) + 0.5 * lam * log_k)
                worst = max(worst, abs(np.expm1((new_log_z - log_z) - log_r)))
            log_z = new_log_z
    return worst <= 1e-8, f"worst relative ratio error {worst:.2e}"


def _check_determinism():
    data = gen_two_level(SimSpec(model="two_level", n=120, seed=11))
    cfg = BoostConfig(
        algo="adaboost", iterations=20, subsample_fraction=0.5,
        tree=TreeConfig(max_leaves=4, mode="classification"), seed=5,
    )
    e1, c1 = run_boost(data, None, cfg)
    e2, c2 = run_boost(data, None, cfg)
    same = e1.to_text() == e2.to_text() and c1 == c2
    return same, "two runs byte-identical" if same else "runs differ"


CHECKS = (
    ("finite_difference_agreement", _check_finite_differences),
    ("line_search_optimality", _check_line_search),
    ("stump_enumeration_equivalence", _check_stump_equivalence),
    ("loss_ratio_identity", _check_loss_ratio),
    ("determinism", _check_determinism),
)


def run_checks():
    results = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append((name, ok, detail))
    return results


def verify(stream=None):
    """Run all checks, print one PASS/FAIL line each; True iff all pass."""
    import sys

    stream = stream or sys.stdout
    results = run_checks()
    for name, ok, detail in results:
        stream.write(f"{'PASS' if ok else 'FAIL'} {name}: {detail}\n")
    return all(ok for _, ok, _ in results)
