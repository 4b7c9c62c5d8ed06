"""DAMVI training and the bagging baselines it is compared against.

DAMVI bags K trees, reweights positive training examples once by how badly
the uniform vote treats them, then learns the vote weights by maximizing
the C-Bound objective under the reweighted sample.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np

from .cbound import (OptimizerConfig, bound_summary, disagreement_matrix, optimize_weights,
                     risk_vector)
from .dataset import (ClassAbsentError, Dataset, bootstrap_sample, random_oversample,
                      random_undersample, smote)
from .tree import Tree, TreeParams, fit_tree
from .vote import Ensemble, VoteMatrix, check_simplex, uniform, vote_matrix

REPORT_FORMAT_VERSION = 1

# spawn-key domains keep the random streams of different stages independent
_BOOTSTRAP, _RESAMPLE, _UNDERSAMPLE, _OPTIMIZER = 0, 1, 2, 3


def child_seed(seed: int, *key: int) -> np.random.SeedSequence:
    """Counter-based seed: depends only on (seed, key), never on K or call order."""
    return np.random.SeedSequence(seed, spawn_key=key)


def int_seed(seed: int, *key: int) -> int:
    return int(child_seed(seed, *key).generate_state(1)[0])


@dataclass(frozen=True)
class DamviConfig:
    k: int = 100
    bootstrap_fraction: float = 0.2
    tree_params: TreeParams = field(default_factory=TreeParams)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 0.0 < self.bootstrap_fraction <= 1.0:
            raise ValueError("bootstrap_fraction must be in (0, 1]")


@dataclass
class DamviReport:
    cbound: float
    gibbs_risk: float
    disagreement: float
    objective: float
    uniform_objective: float
    optimizer_iterations: int
    optimizer_status: str
    bound_applicable: bool
    trace: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        del d["trace"]
        return {"format_version": REPORT_FORMAT_VERSION, **d}

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n",
                              encoding="utf-8")


def _require_trainable(train: Dataset) -> None:
    if train.positive_count == 0 or train.negative_count == 0:
        raise ClassAbsentError("training set must contain both classes")


def train_trees(train: Dataset, k: int, fraction: float, params: TreeParams, seed: int,
                learner: Callable[[Dataset, TreeParams, int], Tree] = fit_tree) -> list[Tree]:
    """Fit ``k`` base learners, each on its own bootstrap of ``train``."""
    trees = []
    for j in range(k):
        s = child_seed(seed, _BOOTSTRAP, j)
        trees.append(learner(bootstrap_sample(train, fraction, s), params, int_seed(seed, _BOOTSTRAP, j)))
    return trees


def update_example_weights(dist, v: VoteMatrix, q) -> np.ndarray:
    """Multiply each positive's weight by exp(-margin) and renormalize.

    Negatives keep their weight before normalization, so hard positives
    (low or negative margin under ``q``) gain mass relative to everything else.
    """
    dist = np.asarray(dist, dtype=float)
    if dist.shape != (v.n,):
        raise ValueError(f"distribution has length {dist.size}, vote matrix has {v.n} rows")
    q = check_simplex(q)
    margins = v.margins(q)
    w = np.where(v.labels == 1, dist * np.exp(-margins), dist)
    z = w.sum()
    if not z > 0:
        raise ArithmeticError("all example weights vanished")
    return w / z


def fit_weights(v: VoteMatrix, optimizer: OptimizerConfig = OptimizerConfig()):
    """Steps after tree training: reweight positives once, then maximize the objective."""
    d0 = np.full(v.n, 1.0 / v.n)
    q_uniform = uniform(v.k)
    d1 = update_example_weights(d0, v, q_uniform)
    r = risk_vector(v, d1)
    m = disagreement_matrix(v, d1)
    result = optimize_weights(r, m, q_uniform, optimizer)
    summary = bound_summary(result.q, r, m)
    report = DamviReport(
        cbound=summary["cbound"],
        gibbs_risk=summary["gibbs_risk"],
        disagreement=summary["disagreement"],
        objective=result.objective,
        uniform_objective=result.init_objective,
        optimizer_iterations=result.iterations,
        optimizer_status=result.status,
        bound_applicable=summary["bound_applicable"],
        trace=result.trace,
    )
    return result, report, d1


def train_damvi(train: Dataset, config: DamviConfig = DamviConfig(), trees: list[Tree] | None = None):
    """Return (ensemble, report). ``trees`` may be passed to reuse already bagged learners."""
    _require_trainable(train)
    if trees is None:
        trees = train_trees(train, config.k, config.bootstrap_fraction, config.tree_params, config.seed)
    v = vote_matrix(trees, train)
    opt = replace(config.optimizer, seed=int_seed(config.seed, _OPTIMIZER))
    result, report, _ = fit_weights(v, opt)
    return Ensemble(trees, result.q), report


def train_uniform_bagging(train: Dataset, config: DamviConfig = DamviConfig()) -> Ensemble:
    """Same trees as :func:`train_damvi` with the same seed, uniform weights."""
    _require_trainable(train)
    trees = train_trees(train, config.k, config.bootstrap_fraction, config.tree_params, config.seed)
    return Ensemble(trees, uniform(config.k))


def _bag_resampled(resampled: Dataset, n_original: int, config: DamviConfig) -> Ensemble:
    # bootstrap size stays tied to the original training size
    fraction = min(1.0, config.bootstrap_fraction * n_original / resampled.n)
    trees = train_trees(resampled, config.k, fraction, config.tree_params, config.seed)
    return Ensemble(trees, uniform(config.k))


def train_ros_bagging(train: Dataset, config: DamviConfig = DamviConfig()) -> Ensemble:
    _require_trainable(train)
    return _bag_resampled(random_oversample(train, child_seed(config.seed, _RESAMPLE)), train.n, config)


def train_smote_bagging(train: Dataset, config: DamviConfig = DamviConfig(), k_neighbors: int = 5) -> Ensemble:
    _require_trainable(train)
    return _bag_resampled(smote(train, k_neighbors, child_seed(config.seed, _RESAMPLE)), train.n, config)


def train_balanced_bagging(train: Dataset, config: DamviConfig = DamviConfig()) -> Ensemble:
    """Each tree sees a fresh random undersampling of the majority class, then a full-size bootstrap."""
    _require_trainable(train)
    trees = []
    for j in range(config.k):
        balanced = random_undersample(train, child_seed(config.seed, _UNDERSAMPLE, j))
        boot = bootstrap_sample(balanced, 1.0, child_seed(config.seed, _BOOTSTRAP, j))
        trees.append(fit_tree(boot, config.tree_params, int_seed(config.seed, _BOOTSTRAP, j)))
    return Ensemble(trees, uniform(config.k))


METHODS = {
    "damvi": lambda train, cfg: train_damvi(train, cfg)[0],
    "uniform-bagging": train_uniform_bagging,
    "ros-bagging": train_ros_bagging,
    "smote-bagging": train_smote_bagging,
    "balanced-bagging": train_balanced_bagging,
}
