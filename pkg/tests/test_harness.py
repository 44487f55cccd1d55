import json
import os

import numpy as np
import pytest

from boostlab.cli import main
from boostlab.experiments import (
    EXPERIMENT_NAMES,
    ExperimentConfig,
    boost_config_from_dict,
    default_experiment_config,
    experiment_config_from_dict,
    read_curves_csv,
    run_experiment,
    summarize_replication,
    write_curves_csv,
    SUMMARY_STATS,
)
from boostlab.metrics import CurvePoint
from boostlab.simdata import SimSpec, gen_two_level, save_csv


def _tiny_config(tmp_path, name="E2_LongRunNoOverfit", **overrides):
    d = {
        "name": name,
        "sim": {"n": 80, "q": 4, "n_active": 2, "seed": 0},
        "arms": {"adaboost8": {"algo": "adaboost", "iterations": 5,
                               "max_leaves": 4}},
        "replications": 2,
        "out_dir": str(tmp_path),
    }
    d.update(overrides)
    return experiment_config_from_dict(d)


def test_default_configs_valid():
    for name in EXPERIMENT_NAMES:
        cfg = default_experiment_config(name)
        assert cfg.name == name and cfg.arms
    with pytest.raises(ValueError):
        default_experiment_config("E7_Mystery")


def test_config_invariants():
    sim = SimSpec(model="two_level", n=100)
    ada = default_experiment_config("E2_LongRunNoOverfit").arms["adaboost8"]
    with pytest.raises(ValueError):
        ExperimentConfig(name="E2_LongRunNoOverfit", sim=sim, arms={})
    with pytest.raises(ValueError):
        ExperimentConfig(name="E2_LongRunNoOverfit", sim=sim,
                         arms={"a": ada}, replications=0)
    with pytest.raises(ValueError):
        # E1 requires a stump arm and a larger-tree arm
        ExperimentConfig(name="E1_StumpsVsTrees", sim=sim, arms={"a": ada})
    with pytest.raises(ValueError):
        # E6 requires both step multipliers
        ExperimentConfig(name="E6_ModifiedAdaBoost", sim=sim, arms={"a": ada})
    with pytest.raises(ValueError):
        # E3 requires both shrinkage levels
        ExperimentConfig(name="E3_Shrinkage", sim=sim, arms={"a": ada})


def test_unknown_config_keys_rejected():
    with pytest.raises(ValueError, match="unknown keys"):
        boost_config_from_dict({"algo": "adaboost", "max_trees": 5})
    with pytest.raises(ValueError, match="unknown keys"):
        experiment_config_from_dict({"name": "E2_LongRunNoOverfit", "reps": 3})
    with pytest.raises(ValueError, match="unknown keys"):
        experiment_config_from_dict(
            {"name": "E2_LongRunNoOverfit", "sim": {"dimension": 4}}
        )
    with pytest.raises(ValueError):
        experiment_config_from_dict({})


def test_boost_config_from_dict_penalty():
    cfg = boost_config_from_dict(
        {"algo": "penalized_fgd", "loss": "bernoulli_log",
         "penalty": {"kind": "scaled", "c": 0.2}, "shrinkage": 0.5}
    )
    assert cfg.penalty.kind == "scaled" and cfg.penalty.c == 0.2
    assert cfg.tree.mode == "regression"
    with pytest.raises(ValueError, match="unknown keys"):
        boost_config_from_dict({"penalty": {"kind": "unit", "scale": 2}})


def test_curves_csv_round_trip(tmp_path):
    curves = [
        CurvePoint(1, "train", 0.25, 1.0, 0.5, 0.01, 0.0),
        CurvePoint(1, "holdout", 0.5, 1.25, float("nan"), None, 1.0),
    ]
    path = tmp_path / "curves.csv"
    write_curves_csv(path, curves)
    back = read_curves_csv(path)
    assert back[0] == curves[0]
    assert back[1].prob_mse is None and np.isnan(back[1].nll)
    (tmp_path / "bad.csv").write_text("wrong,header\n")
    with pytest.raises(ValueError, match="header"):
        read_curves_csv(tmp_path / "bad.csv")


def test_run_experiment_outputs(tmp_path):
    cfg = _tiny_config(tmp_path)
    summary = run_experiment(cfg)
    for r in range(2):
        assert (tmp_path / f"curves_adaboost8_{r}.csv").exists()
    assert (tmp_path / "summary.csv").exists()
    meta = json.loads((tmp_path / "meta.json").read_text())
    assert meta["experiment"] == cfg.name
    assert meta["arms"]["adaboost8"]["max_leaves"] == 4

    # summary aggregates are recomputable from the curve files
    stats = [
        summarize_replication(
            read_curves_csv(tmp_path / f"curves_adaboost8_{r}.csv")
        )
        for r in range(2)
    ]
    for stat in SUMMARY_STATS:
        vals = np.array([row[stat] for row in stats])
        assert summary["adaboost8"][stat + "_mean"] == pytest.approx(
            float(np.mean(vals)), nan_ok=True
        )
        assert summary["adaboost8"][stat + "_sd"] == pytest.approx(
            float(np.std(vals)), nan_ok=True
        )


def test_run_experiment_zero_iteration_arm(tmp_path):
    cfg = _tiny_config(
        tmp_path,
        arms={"empty": {"algo": "adaboost", "iterations": 0}},
        replications=1,
    )
    run_experiment(cfg)
    text = (tmp_path / "curves_empty_0.csv").read_text()
    assert text.splitlines() == [
        "iteration,split,miscl,exp_loss,nll,prob_mse,frac_extreme"
    ]


def test_run_experiment_byte_deterministic(tmp_path):
    out = []
    for sub in ("a", "b"):
        cfg = _tiny_config(tmp_path / sub)
        run_experiment(cfg)
        out.append({
            p: (tmp_path / sub / p).read_bytes()
            for p in os.listdir(tmp_path / sub)
        })
    assert out[0] == out[1]


def test_summarize_replication_stats():
    curves = [
        CurvePoint(1, "train", 0.3, 1.0, 0.6, None, 0.0),
        CurvePoint(1, "holdout", 0.4, 1.1, 0.7, None, 0.2),
        CurvePoint(2, "train", 0.2, 0.9, 0.5, None, 0.0),
        CurvePoint(2, "holdout", 0.3, 1.0, 0.6, None, 0.6),
        CurvePoint(3, "train", 0.1, 0.81, 0.4, None, 0.0),
        CurvePoint(3, "holdout", 0.35, 1.0, 0.65, None, 0.7),
    ]
    out = summarize_replication(curves)
    assert out["final_holdout_miscl"] == 0.35
    assert out["best_holdout_miscl"] == 0.3
    assert out["miscl_argmin_iter"] == 2.0
    assert out["nll_argmin_iter"] == 2.0
    assert out["max_frac_extreme"] == 0.7
    assert out["max_exp_loss_drift"] == pytest.approx(0.1)


def test_cli_verify_exits_zero():
    assert main(["verify"]) == 0


def test_cli_fit(tmp_path):
    data = gen_two_level(SimSpec(model="two_level", n=60, q=3, n_active=2, seed=1))
    csv = tmp_path / "train.csv"
    save_csv(data, csv)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"algo": "adaboost", "iterations": 3}))
    out = tmp_path / "out"
    rc = main(["fit", "--data", str(csv), "--holdout", str(csv),
               "--config", str(cfg), "--out-dir", str(out)])
    assert rc == 0
    assert (out / "curves.csv").exists() and (out / "ensemble.txt").exists()
    assert (out / "ensemble.txt").read_text().startswith("boostlab-ensemble 1")


def test_cli_error_exit_codes(tmp_path):
    assert main(["fit", "--data", str(tmp_path / "missing.csv")]) == 1
    assert main(["experiment"]) == 1  # needs --name or --config
    assert main(["experiment", "--name", "E9_Nope"]) == 1  # usage error
    assert main(["--bogus"]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["experiment", "--config", str(bad)]) == 1
    conflict = tmp_path / "e2.json"
    conflict.write_text(json.dumps({"name": "E2_LongRunNoOverfit"}))
    assert main(["experiment", "--name", "E3_Shrinkage",
                 "--config", str(conflict)]) == 1


def test_cli_experiment_from_config(tmp_path):
    cfg = {
        "name": "E6_ModifiedAdaBoost",
        "sim": {"n": 80, "q": 4, "n_active": 2},
        "arms": {
            "lambda_1": {"algo": "adaboost", "iterations": 4,
                         "step_multiplier": 1.0, "max_leaves": 4},
            "lambda_2": {"algo": "adaboost", "iterations": 4,
                         "step_multiplier": 2.0, "max_leaves": 4},
        },
        "replications": 1,
    }
    path = tmp_path / "e6.json"
    path.write_text(json.dumps(cfg))
    rc = main(["experiment", "--config", str(path), "--out-dir", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "curves_lambda_1_0.csv").exists()
    assert (tmp_path / "curves_lambda_2_0.csv").exists()
    assert (tmp_path / "summary.csv").exists()
