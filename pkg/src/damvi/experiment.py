"""Repeated train/test experiments: method comparison and imbalance sweeps."""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .algorithm import METHODS, DamviConfig, int_seed, train_damvi, train_trees
from .dataset import Dataset, stratified_split, subsample_to_ratio
from .metrics import average_precision, f1_score, wilcoxon_rank_sum
from .vote import Ensemble, uniform

RESULTS_SCHEMA_VERSION = 1
SUMMARY_COLUMNS = ["method", "f1_mean", "f1_std", "ap_mean", "ap_std", "p_f1", "p_ap"]
REPETITION_COLUMNS = ["method", "repetition", "split_seed", "f1", "ap", "n_test", "n_test_positive"]
SWEEP_COLUMNS = ["ir", "method", "repetition", "f1", "ap", "n_positive", "n"]

# seed domains for the harness, distinct from those used inside training
_SPLIT, _TRAIN, _SUBSAMPLE = 10, 11, 12


@dataclass(frozen=True)
class ExperimentConfig:
    methods: tuple = ("damvi", "uniform-bagging")
    repetitions: int = 5
    test_fraction: float = 0.3
    damvi: DamviConfig = field(default_factory=DamviConfig)
    seed: int = 0
    n_jobs: int = 1

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.methods:
            raise ValueError("at least one method is required")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}; choose from {sorted(METHODS)}")


def evaluate(e: Ensemble, ds: Dataset) -> dict:
    scores = e.scores(ds.X)
    predictions = np.where(scores >= 0, 1, -1)
    return {
        "f1": f1_score(predictions, ds.y),
        "average_precision": average_precision(scores, ds.y),
        "n": ds.n,
        "positive_count": ds.positive_count,
    }


def split_seed(base_seed: int, repetition: int) -> int:
    return int_seed(base_seed, _SPLIT, repetition)


def train_methods(train: Dataset, methods: Sequence[str], cfg: DamviConfig) -> dict[str, Ensemble]:
    """Train each method; DAMVI and uniform bagging share one set of bagged trees."""
    models = {}
    shared = None
    if "damvi" in methods or "uniform-bagging" in methods:
        shared = train_trees(train, cfg.k, cfg.bootstrap_fraction, cfg.tree_params, cfg.seed)
    for method in methods:
        if method == "damvi":
            models[method] = train_damvi(train, cfg, trees=shared)[0]
        elif method == "uniform-bagging":
            models[method] = Ensemble(shared, uniform(cfg.k))
        else:
            models[method] = METHODS[method](train, cfg)
    return models


def _one_repetition(args):
    ds, cfg, rep = args
    s = split_seed(cfg.seed, rep)
    train, test = stratified_split(ds, cfg.test_fraction, s)
    models = train_methods(train, cfg.methods, replace(cfg.damvi, seed=int_seed(cfg.seed, _TRAIN, rep)))
    rows = []
    for method in cfg.methods:
        m = evaluate(models[method], test)
        rows.append({"method": method, "repetition": rep, "split_seed": s, "f1": m["f1"],
                     "ap": m["average_precision"], "n_test": test.n,
                     "n_test_positive": test.positive_count})
    return rows


def _map(fn, jobs, n_jobs: int):
    if n_jobs == 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(fn, jobs))


def run_compare(ds: Dataset, cfg: ExperimentConfig) -> tuple[list[dict], list[dict]]:
    """Per-repetition rows and one summary row per method."""
    per_rep = [row for rows in _map(_one_repetition, [(ds, cfg, r) for r in range(cfg.repetitions)], cfg.n_jobs)
               for row in rows]
    return per_rep, summarize(per_rep, cfg.methods)


def _std(x) -> float:
    return float(np.std(x, ddof=1)) if len(x) > 1 else 0.0


def summarize(per_rep: list[dict], methods: Sequence[str]) -> list[dict]:
    by_method = {m: [r for r in per_rep if r["method"] == m] for m in methods}
    ref = by_method.get("damvi")
    summary = []
    for method in methods:
        rows = by_method[method]
        f1 = [r["f1"] for r in rows]
        ap = [r["ap"] for r in rows]
        out = {"method": method, "f1_mean": float(np.mean(f1)), "f1_std": _std(f1),
               "ap_mean": float(np.mean(ap)), "ap_std": _std(ap), "p_f1": "", "p_ap": ""}
        if ref is not None and method != "damvi":
            out["p_f1"] = wilcoxon_rank_sum([r["f1"] for r in ref], f1).p_value
            out["p_ap"] = wilcoxon_rank_sum([r["ap"] for r in ref], ap).p_value
        summary.append(out)
    return summary


def _one_sweep_cell(args):
    ds, cfg, i, ir, rep = args
    sub = subsample_to_ratio(ds, ir, int_seed(cfg.seed, _SUBSAMPLE, i, rep))
    train, test = stratified_split(sub, cfg.test_fraction, split_seed(cfg.seed, rep))
    models = train_methods(train, cfg.methods, replace(cfg.damvi, seed=int_seed(cfg.seed, _TRAIN, rep)))
    rows = []
    for method in cfg.methods:
        m = evaluate(models[method], test)
        rows.append({"ir": ir, "method": method, "repetition": rep, "f1": m["f1"],
                     "ap": m["average_precision"], "n_positive": sub.positive_count, "n": sub.n})
    return rows


def run_sweep(ds: Dataset, ir_grid: Sequence[float], cfg: ExperimentConfig) -> list[dict]:
    jobs = [(ds, cfg, i, ir, rep) for i, ir in enumerate(ir_grid) for rep in range(cfg.repetitions)]
    return [row for rows in _map(_one_sweep_cell, jobs, cfg.n_jobs) for row in rows]


def sweep_means(rows: list[dict]) -> dict[tuple[float, str], dict]:
    """(ir, method) -> mean f1 / ap over repetitions."""
    cells: dict = {}
    for r in rows:
        cells.setdefault((r["ir"], r["method"]), []).append(r)
    return {key: {"f1": float(np.mean([r["f1"] for r in v])), "ap": float(np.mean([r["ap"] for r in v]))}
            for key, v in cells.items()}


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def write_rows(path, columns: Sequence[str], rows: list[dict]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in columns])


def read_rows(path) -> list[dict]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_manifest(out_dir, files: dict[str, Sequence[str]], extra: dict | None = None) -> None:
    """Schema record for the CSV outputs of a run: file name -> column list."""
    manifest = {"format_version": RESULTS_SCHEMA_VERSION,
                "files": {name: {"columns": list(cols)} for name, cols in files.items()}}
    if extra:
        manifest.update(extra)
    Path(out_dir, "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                                              encoding="utf-8")
