"""Weighted majority vote over a fixed set of classifiers."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .dataset import Dataset
from .tree import Tree

MODEL_FORMAT_VERSION = 1
SIMPLEX_ATOL = 1e-9


def check_simplex(q, name: str = "weights") -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.ndim != 1 or q.size == 0:
        raise ValueError(f"{name} must be a non-empty vector")
    if np.any(q < 0) or abs(q.sum() - 1.0) > SIMPLEX_ATOL:
        raise ValueError(f"{name} must lie on the probability simplex (sum={q.sum()!r})")
    return q


def uniform(k: int) -> np.ndarray:
    return np.full(k, 1.0 / k)


def sign_with_tie(score) -> np.ndarray:
    """Sign where a zero score votes for the positive class."""
    return np.where(np.asarray(score) >= 0, 1, -1)


@dataclass(frozen=True, eq=False)
class VoteMatrix:
    """h[i, k] = prediction of classifier k on example i, all entries +/-1."""

    h: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h)
        labels = np.asarray(self.labels)
        if h.ndim != 2 or labels.shape != (h.shape[0],):
            raise ValueError(f"vote matrix {h.shape} does not match {labels.shape} labels")
        if not (np.all(np.abs(h) == 1) and np.all(np.abs(labels) == 1)):
            raise ValueError("votes and labels must be exactly -1 or +1")
        object.__setattr__(self, "h", h.astype(np.int8))
        object.__setattr__(self, "labels", labels.astype(np.int8))

    @property
    def n(self) -> int:
        return self.h.shape[0]

    @property
    def k(self) -> int:
        return self.h.shape[1]

    def scores(self, q) -> np.ndarray:
        return self.h @ np.asarray(q, dtype=float)

    def margins(self, q) -> np.ndarray:
        return self.labels * self.scores(q)


@dataclass(frozen=True, eq=False)
class Ensemble:
    classifiers: tuple
    weights: np.ndarray

    def __post_init__(self):
        classifiers = tuple(self.classifiers)
        if not classifiers:
            raise ValueError("an ensemble needs at least one classifier")
        weights = check_simplex(self.weights).copy()
        if weights.size != len(classifiers):
            raise ValueError(f"{len(classifiers)} classifiers but {weights.size} weights")
        dims = {c.n_features for c in classifiers}
        if len(dims) != 1:
            raise ValueError(f"classifiers disagree on input dimension: {sorted(dims)}")
        weights.setflags(write=False)
        object.__setattr__(self, "classifiers", classifiers)
        object.__setattr__(self, "weights", weights)

    @property
    def k(self) -> int:
        return len(self.classifiers)

    @property
    def n_features(self) -> int:
        return self.classifiers[0].n_features

    def with_weights(self, weights) -> "Ensemble":
        return Ensemble(self.classifiers, weights)

    def votes(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(f"expected shape (n, {self.n_features}), got {X.shape}")
        return np.column_stack([c.predict(X) for c in self.classifiers])

    def scores(self, X) -> np.ndarray:
        return self.votes(X) @ self.weights

    def predict(self, X) -> np.ndarray:
        return sign_with_tie(self.scores(X))

    def to_dict(self) -> dict:
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "weights": [float(w) for w in self.weights],
            "classifiers": [c.to_dict() for c in self.classifiers],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Ensemble":
        version = data.get("format_version")
        if version != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format_version {version!r}")
        return cls([Tree.from_dict(c) for c in data["classifiers"]], np.array(data["weights"], dtype=float))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), separators=(",", ":")) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "Ensemble":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def vote_matrix(classifiers: Sequence[Tree], ds: Dataset) -> VoteMatrix:
    if not classifiers or ds.n == 0:
        raise ValueError("need at least one classifier and one example")
    for c in classifiers:
        if c.n_features != ds.dimension:
            raise ValueError(f"tree expects dimension {c.n_features}, dataset has {ds.dimension}")
    return VoteMatrix(np.column_stack([c.predict(ds.X) for c in classifiers]), ds.y)


def ensemble_score(e: Ensemble, x) -> float:
    """Q-weighted average vote on a single input, in [-1, 1]."""
    x = np.asarray(x, dtype=float)
    if x.shape != (e.n_features,):
        raise ValueError(f"expected a vector of length {e.n_features}, got shape {x.shape}")
    return float(e.scores(x[None, :])[0])


def predict_mv(e: Ensemble, x) -> int:
    return int(sign_with_tie(ensemble_score(e, x)))


def empirical_mv_risk(e: Ensemble, ds: Dataset, dist=None) -> float:
    """Distribution-weighted 0/1 risk of the majority vote (uniform if ``dist`` is None)."""
    if dist is None:
        dist = np.full(ds.n, 1.0 / ds.n)
    dist = np.asarray(dist, dtype=float)
    if dist.shape != (ds.n,):
        raise ValueError(f"distribution has length {dist.size}, dataset has {ds.n} examples")
    return float(dist @ (e.predict(ds.X) != ds.y))


def mv_risk_from_votes(v: VoteMatrix, q, dist) -> float:
    """Same quantity as :func:`empirical_mv_risk`, from precomputed votes."""
    dist = np.asarray(dist, dtype=float)
    if dist.shape != (v.n,):
        raise ValueError(f"distribution has length {dist.size}, vote matrix has {v.n} rows")
    return float(dist @ (sign_with_tie(v.scores(q)) != v.labels))
