import numpy as np
import pytest

from damvi.algorithm import DamviConfig
from damvi.dataset import make_synthetic
from damvi.experiment import (ExperimentConfig, read_rows, run_compare, run_sweep, split_seed,
                              summarize, sweep_means, write_rows, SUMMARY_COLUMNS)


@pytest.fixture(scope="module")
def ds():
    return make_synthetic(600, 4, 0.05, 2.0, 0)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(repetitions=0)
    with pytest.raises(ValueError):
        ExperimentConfig(methods=())
    with pytest.raises(ValueError):
        ExperimentConfig(methods=("damvi", "adaboost"))


def test_split_seeds_distinct():
    seeds = [split_seed(0, r) for r in range(5)]
    assert len(set(seeds)) == 5
    assert seeds == [split_seed(0, r) for r in range(5)]


def test_compare_rows_and_aggregation(ds):
    cfg = ExperimentConfig(methods=("damvi", "uniform-bagging", "ros-bagging"), repetitions=3,
                           damvi=DamviConfig(k=5))
    per_rep, summary = run_compare(ds, cfg)
    assert len(per_rep) == 9 and [s["method"] for s in summary] == list(cfg.methods)
    damvi = [r for r in per_rep if r["method"] == "damvi"]
    assert summary[0]["f1_mean"] == pytest.approx(np.mean([r["f1"] for r in damvi]))
    assert summary[0]["p_f1"] == "" and 0 <= summary[1]["p_f1"] <= 1


def test_compare_parallel_matches_serial(ds):
    cfg = ExperimentConfig(repetitions=2, damvi=DamviConfig(k=3))
    serial = run_compare(ds, cfg)[0]
    parallel = run_compare(ds, ExperimentConfig(repetitions=2, damvi=DamviConfig(k=3), n_jobs=2))[0]
    assert serial == parallel


def test_sweep_structure(ds):
    cfg = ExperimentConfig(repetitions=2, damvi=DamviConfig(k=3))
    grid = [0.01, 0.02, 0.04, 0.08]
    rows = run_sweep(ds, grid, cfg)
    assert len(rows) == len(grid) * 2 * 2
    assert sorted({r["ir"] for r in rows}) == grid
    pos = {r["ir"]: r["n_positive"] for r in rows}
    assert [pos[g] for g in grid] == sorted(pos[g] for g in grid)
    assert set(sweep_means(rows)) == {(g, m) for g in grid for m in cfg.methods}


def test_rows_round_trip(tmp_path):
    rows = summarize([{"method": "damvi", "f1": 0.5, "ap": 0.25}], ["damvi"])
    write_rows(tmp_path / "r.csv", SUMMARY_COLUMNS, rows)
    back = read_rows(tmp_path / "r.csv")
    assert float(back[0]["f1_mean"]) == 0.5 and back[0]["p_f1"] == ""
