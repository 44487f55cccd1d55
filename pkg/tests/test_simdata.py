import numpy as np
import pytest
from scipy.stats import chi2

from boostlab.simdata import (
    Dataset,
    DatasetParseError,
    SimSpec,
    gen_logistic_additive,
    gen_two_level,
    generate,
    load_csv,
    save_csv,
    split_train_holdout,
)


def test_spec_validation():
    with pytest.raises(ValueError):
        SimSpec(model="donut")
    with pytest.raises(ValueError):
        SimSpec(n=0)
    with pytest.raises(ValueError):
        SimSpec(n_active=25, q=20)
    with pytest.raises(ValueError):
        SimSpec(p_lo=0.9, p_hi=0.1)
    with pytest.raises(ValueError):
        SimSpec(p_lo=0.0)


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(np.zeros(4), np.ones(4, dtype=int))  # 1-D features
    with pytest.raises(ValueError):
        Dataset(np.zeros((4, 2)), np.array([1, 1, 1]))
    with pytest.raises(ValueError):
        Dataset(np.zeros((2, 1)), np.array([1, 0]))
    with pytest.raises(ValueError):
        Dataset(np.zeros((2, 1)), np.array([1, -1]), np.array([0.5]))


def test_reproducibility():
    spec = SimSpec(model="two_level", n=300, seed=7)
    a, b = gen_two_level(spec), gen_two_level(spec)
    np.testing.assert_array_equal(a.features, b.features)
    np.testing.assert_array_equal(a.labels, b.labels)
    np.testing.assert_array_equal(a.true_probs, b.true_probs)
    c = gen_two_level(spec.with_seed(8))
    assert not np.array_equal(a.features, c.features)


def test_two_level_probs_two_valued():
    data = gen_two_level(SimSpec(model="two_level", n=2000, seed=1))
    assert set(np.unique(data.true_probs)) == {0.1, 0.9}
    # Bayes error is min(p_lo, 1 - p_hi) = 0.1 everywhere
    np.testing.assert_allclose(
        np.minimum(data.true_probs, 1 - data.true_probs), 0.1
    )


def test_two_level_degenerate_half():
    spec = SimSpec(model="two_level", n=10000, p_lo=0.5, p_hi=0.5, seed=2)
    data = gen_two_level(spec)
    # labels independent of features: 3 binomial SDs around 0.5
    phat = np.mean(data.labels == 1)
    assert abs(phat - 0.5) <= 3.0 * np.sqrt(0.25 / data.n)


def test_two_level_high_region_calibration():
    data = gen_two_level(SimSpec(model="two_level", n=10000, seed=3))
    high = data.true_probs == 0.9
    n_region = int(high.sum())
    phat = np.mean(data.labels[high] == 1)
    assert abs(phat - 0.9) <= 3.0 * np.sqrt(0.09 / n_region)


def test_logistic_additive_boundary_and_flat():
    data = gen_logistic_additive(SimSpec(model="logistic_additive", n=500, seed=4))
    assert np.all((data.true_probs > 0.0) & (data.true_probs < 1.0))
    # zero slope flattens the model to p = 0.5 everywhere
    flat = gen_logistic_additive(
        SimSpec(model="logistic_additive", n=100, slope=0.0, seed=4)
    )
    np.testing.assert_array_equal(flat.true_probs, np.full(100, 0.5))
    # a point on the boundary has probability exactly 0.5
    spec = SimSpec(model="logistic_additive", n=10, seed=4)
    s = (data.features[:, :5] - 0.5).sum(axis=1)
    probs = 1.0 / (1.0 + np.exp(-spec.slope * s))
    np.testing.assert_allclose(data.true_probs, probs)


def test_logistic_additive_calibration():
    data = gen_logistic_additive(
        SimSpec(model="logistic_additive", n=10000, seed=5)
    )
    phat = np.mean(data.labels == 1)
    pbar = np.mean(data.true_probs)
    sd = np.sqrt(np.mean(data.true_probs * (1 - data.true_probs)) / data.n)
    assert abs(phat - pbar) <= 3.0 * sd


def test_label_generation_chi_square():
    # chi-square goodness of fit over probability strata at n = 1e5
    data = gen_two_level(SimSpec(model="two_level", n=100000, seed=6))
    stat = 0.0
    dof = 0
    for level in (0.1, 0.9):
        mask = data.true_probs == level
        n_s = int(mask.sum())
        obs1 = int(np.sum(data.labels[mask] == 1))
        exp1 = level * n_s
        exp0 = (1 - level) * n_s
        stat += (obs1 - exp1) ** 2 / exp1 + ((n_s - obs1) - exp0) ** 2 / exp0
        dof += 1
    p_value = chi2.sf(stat, dof)
    assert p_value > 1e-4


def test_generate_dispatch():
    assert generate(SimSpec(model="two_level", n=50)).n == 50
    assert generate(SimSpec(model="logistic_additive", n=50)).n == 50


def test_split_sizes_and_partition():
    data = gen_two_level(SimSpec(model="two_level", n=10, seed=0))
    train, hold = split_train_holdout(data, 0.5, seed=1)
    assert (train.n, hold.n) == (5, 5)
    merged = np.vstack([train.features, hold.features])
    # disjoint and exhaustive: every original row appears exactly once
    orig = {tuple(r) for r in data.features}
    assert {tuple(r) for r in merged} == orig and len(merged) == 10

    t2, h2 = split_train_holdout(data, 0.5, seed=1)
    np.testing.assert_array_equal(train.features, t2.features)
    np.testing.assert_array_equal(hold.features, h2.features)

    tiny = gen_two_level(SimSpec(model="two_level", n=3, seed=0))
    t3, h3 = split_train_holdout(tiny, 0.34, seed=0)
    assert (t3.n, h3.n) == (2, 1)


def test_split_errors():
    data = gen_two_level(SimSpec(model="two_level", n=10, seed=0))
    with pytest.raises(ValueError):
        split_train_holdout(data, 0.0, seed=0)
    with pytest.raises(ValueError):
        split_train_holdout(data, 1.0, seed=0)
    one = gen_two_level(SimSpec(model="two_level", n=1, seed=0))
    with pytest.raises(ValueError):
        split_train_holdout(one, 0.5, seed=0)


def test_csv_round_trip(tmp_path):
    data = gen_two_level(SimSpec(model="two_level", n=40, q=3, n_active=2, seed=9))
    path = tmp_path / "data.csv"
    save_csv(data, path)
    back = load_csv(path)
    # 9-significant-digit text round-trip
    np.testing.assert_allclose(back.features, data.features, rtol=1e-8)
    np.testing.assert_array_equal(back.labels, data.labels)
    np.testing.assert_allclose(back.true_probs, data.true_probs, rtol=1e-8)

    bare = Dataset(data.features, data.labels)
    save_csv(bare, path)
    assert load_csv(path).true_probs is None


def test_csv_parse_errors(tmp_path):
    path = tmp_path / "bad.csv"

    def write(text):
        path.write_text(text)

    write("f1,label\n0.5,0\n")
    with pytest.raises(DatasetParseError, match="line 2"):
        load_csv(path)
    write("f1,label\n0.5\n")
    with pytest.raises(DatasetParseError, match="line 2"):
        load_csv(path)
    write("f1,label\n,1\n")
    with pytest.raises(DatasetParseError, match="line 2"):
        load_csv(path)
    write("f1,label\nnan,1\n")
    with pytest.raises(DatasetParseError, match="non-finite"):
        load_csv(path)
    write("x1,label\n0.5,1\n")
    with pytest.raises(DatasetParseError, match="line 1"):
        load_csv(path)
    write("f1,label,true_prob\n0.5,1,1.5\n")
    with pytest.raises(DatasetParseError, match="true_prob"):
        load_csv(path)
    write("f1,label\n")
    with pytest.raises(DatasetParseError):
        load_csv(path)
