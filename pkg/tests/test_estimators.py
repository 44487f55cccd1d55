import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from boostlab.estimators import BoostingClassifier
from boostlab.losses import UnsupportedLinkError
from boostlab.simdata import SimSpec, gen_two_level


def _data(n=200, seed=0):
    d = gen_two_level(SimSpec(model="two_level", n=n, q=5, n_active=2, seed=seed))
    return d.features, d.labels


def test_get_set_params_and_clone():
    est = BoostingClassifier(n_iterations=7, max_leaves=4)
    params = est.get_params()
    assert params["n_iterations"] == 7 and params["max_leaves"] == 4
    est.set_params(shrinkage=0.3)
    assert est.shrinkage == 0.3
    dup = clone(est)
    assert dup.get_params() == est.get_params()


def test_fit_predict_adaboost():
    X, y = _data()
    est = BoostingClassifier(n_iterations=20, max_leaves=4).fit(X, y)
    assert est.n_features_in_ == 5
    assert est.ensemble_.n_terms <= 20
    np.testing.assert_array_equal(est.classes_, [-1, 1])
    pred = est.predict(X)
    assert set(np.unique(pred)) <= {-1, 1}
    # better than chance on its own training data
    assert np.mean(pred != y) < 0.5
    proba = est.predict_proba(X)
    assert proba.shape == (len(y), 2)
    np.testing.assert_allclose(proba.sum(axis=1), 1.0)
    # decision threshold and probability threshold agree
    np.testing.assert_array_equal(pred == 1, proba[:, 1] >= 0.5)


def test_fit_zero_one_labels():
    X, y = _data()
    est = BoostingClassifier(n_iterations=5).fit(X, (y + 1) // 2)
    np.testing.assert_array_equal(est.classes_, [0, 1])
    assert set(np.unique(est.predict(X))) <= {0, 1}


def test_fit_rejects_bad_labels():
    X, y = _data()
    with pytest.raises(ValueError):
        BoostingClassifier().fit(X, y + 2)


def test_fgd_estimator_and_no_link():
    X, y = _data()
    est = BoostingClassifier(
        algo="penalized_fgd", loss="bernoulli_log", penalty="curvature",
        n_iterations=10, shrinkage=0.5, max_leaves=4,
    ).fit(X, y)
    assert np.mean(est.predict(X) != y) < 0.5
    sq = BoostingClassifier(
        algo="penalized_fgd", loss="squared", n_iterations=5
    ).fit(X, y)
    with pytest.raises(UnsupportedLinkError):
        sq.predict_proba(X)


def test_unfitted_raises():
    with pytest.raises(NotFittedError):
        BoostingClassifier().predict(np.zeros((2, 3)))


def test_determinism_across_fits():
    X, y = _data()
    kw = dict(n_iterations=15, subsample_fraction=0.5, random_state=3)
    a = BoostingClassifier(**kw).fit(X, y)
    b = BoostingClassifier(**kw).fit(X, y)
    assert a.ensemble_.to_text() == b.ensemble_.to_text()
    assert a.curves_ == b.curves_
