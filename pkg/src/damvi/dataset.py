"""Labeled binary datasets: loading, splitting and resampling.

Labels are normalized to {-1, +1} at construction; +1 is the class of
interest (the minority class in every use made of this package). Every
sampling routine is a pure function of its input and an integer seed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, NamedTuple

import numpy as np


class DataError(ValueError):
    """Base class for problems with the data itself (exit code 2 in the CLI)."""


class MissingFileError(DataError):
    pass


class MissingColumnError(DataError):
    pass


class ParseError(DataError):
    def __init__(self, row: int, column: str, value: str):
        super().__init__(f"row {row}, column {column!r}: cannot parse {value!r} as a finite number")
        self.row = row
        self.column = column
        self.value = value


class EmptyDatasetError(DataError):
    pass


class ClassAbsentError(DataError):
    pass


class Example(NamedTuple):
    features: np.ndarray
    label: int


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable (X, y) pair with y in {-1, +1}."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.array(self.X, dtype=float, copy=True)
        y = np.array(self.y, copy=True)
        if X.ndim != 2:
            raise ValueError(f"features must be a 2-D array, got shape {X.shape}")
        if y.shape != (X.shape[0],):
            raise ValueError(f"{X.shape[0]} feature rows but {y.shape} labels")
        if X.shape[1] < 1:
            raise ValueError("dimension must be positive")
        if not np.all((y == 1) | (y == -1)):
            raise ValueError("labels must be exactly -1 or +1")
        y = y.astype(np.int64)
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def dimension(self) -> int:
        return self.X.shape[1]

    @property
    def positive_count(self) -> int:
        return int(np.count_nonzero(self.y == 1))

    @property
    def negative_count(self) -> int:
        return self.n - self.positive_count

    @property
    def imbalance_ratio(self) -> float:
        return self.positive_count / self.n if self.n else 0.0

    def __len__(self) -> int:
        return self.n

    def __iter__(self) -> Iterator[Example]:
        for x, label in zip(self.X, self.y):
            yield Example(x, int(label))

    def take(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(self.X[idx], self.y[idx])

    def __repr__(self) -> str:
        return (f"Dataset(n={self.n}, d={self.dimension}, "
                f"positives={self.positive_count}, ir={self.imbalance_ratio:.4f})")


def concat(a: Dataset, b: Dataset) -> Dataset:
    if a.dimension != b.dimension:
        raise ValueError(f"dimension mismatch: {a.dimension} vs {b.dimension}")
    return Dataset(np.vstack([a.X, b.X]), np.concatenate([a.y, b.y]))


def _round_half_up(x: float) -> int:
    # small epsilon absorbs products like 0.3 * 5 = 1.4999999999999998
    return int(math.floor(x + 0.5 + 1e-9))


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def load_csv(path, label_column: str, positive_label: str) -> Dataset:
    """Read a headed CSV; rows whose label equals ``positive_label`` become +1.

    Label comparison is done on the raw cell text, and additionally
    numerically when both sides parse as numbers (so ``1`` matches ``1.0``).
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise EmptyDatasetError(f"{path} is empty") from None
        if label_column not in header:
            raise MissingColumnError(f"label column {label_column!r} not in header {header}")
        label_idx = header.index(label_column)
        feature_cols = [i for i in range(len(header)) if i != label_idx]
        if not feature_cols:
            raise MissingColumnError("no feature columns besides the label")

        pos_text = str(positive_label).strip()
        try:
            pos_num = float(pos_text)
        except ValueError:
            pos_num = None

        rows, labels = [], []
        for row_no, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ParseError(row_no, "<row>", ",".join(row))
            feats = []
            for i in feature_cols:
                cell = row[i].strip()
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(row_no, header[i], cell) from None
                if not math.isfinite(v):
                    raise ParseError(row_no, header[i], cell)
                feats.append(v)
            raw = row[label_idx].strip()
            is_pos = raw == pos_text
            if not is_pos and pos_num is not None:
                try:
                    is_pos = float(raw) == pos_num
                except ValueError:
                    pass
            rows.append(feats)
            labels.append(1 if is_pos else -1)

    if not rows:
        raise EmptyDatasetError(f"{path} has a header but no data rows")
    return Dataset(np.array(rows, dtype=float), np.array(labels))


def save_csv(ds: Dataset, path, label_column: str = "label") -> None:
    """Write ``ds`` in the format read by :func:`load_csv` (labels as -1/1)."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{j}" for j in range(ds.dimension)] + [label_column])
        for x, label in zip(ds.X, ds.y):
            w.writerow([repr(float(v)) for v in x] + [int(label)])


def _require_both_classes(ds: Dataset) -> None:
    if ds.positive_count == 0 or ds.negative_count == 0:
        raise ClassAbsentError(
            f"both classes required, got {ds.positive_count} positives / {ds.negative_count} negatives")


def stratified_split(ds: Dataset, test_fraction: float, seed) -> tuple[Dataset, Dataset]:
    """Per-class random split; test count per class is round-half-up(count * fraction)."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    _require_both_classes(ds)
    rng = _rng(seed)
    train_idx, test_idx = [], []
    for label in (1, -1):
        idx = np.flatnonzero(ds.y == label)
        idx = idx[rng.permutation(idx.size)]
        n_test = _round_half_up(idx.size * test_fraction)
        test_idx.append(idx[:n_test])
        train_idx.append(idx[n_test:])
    train_idx = np.sort(np.concatenate(train_idx))
    test_idx = np.sort(np.concatenate(test_idx))
    if train_idx.size == 0 or test_idx.size == 0:
        raise DataError(f"test_fraction={test_fraction} leaves an empty split for n={ds.n}")
    return ds.take(train_idx), ds.take(test_idx)


def bootstrap_size(n: int, fraction: float) -> int:
    return max(1, math.ceil(fraction * n - 1e-9))


def bootstrap_sample(ds: Dataset, fraction: float, seed) -> Dataset:
    """Uniform sample with replacement of size ceil(fraction * n)."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    if ds.n == 0:
        raise EmptyDatasetError("cannot bootstrap an empty dataset")
    idx = _rng(seed).integers(0, ds.n, size=bootstrap_size(ds.n, fraction))
    return ds.take(idx)


def make_synthetic(n: int, d: int, imbalance_ratio: float, class_separation: float, seed) -> Dataset:
    """Two mirrored unit-variance Gaussians at +/- class_separation * 1/sqrt(d).

    The Bayes error is Phi(-class_separation) for balanced priors, which
    makes the generator handy for sanity checks.
    """
    if not 0.0 < imbalance_ratio <= 0.5:
        raise ValueError(f"imbalance_ratio must be in (0, 0.5], got {imbalance_ratio}")
    if class_separation < 0:
        raise ValueError("class_separation must be non-negative")
    n_pos = _round_half_up(imbalance_ratio * n)
    if n_pos < 1:
        raise DataError(f"n={n}, imbalance_ratio={imbalance_ratio} implies zero positives")
    rng = _rng(seed)
    mean = np.full(d, class_separation / math.sqrt(d))
    X = np.vstack([
        rng.standard_normal((n_pos, d)) + mean,
        rng.standard_normal((n - n_pos, d)) - mean,
    ])
    y = np.concatenate([np.ones(n_pos, dtype=np.int64), -np.ones(n - n_pos, dtype=np.int64)])
    order = rng.permutation(n)
    return Dataset(X[order], y[order])


def _minority_label(ds: Dataset) -> int:
    return 1 if ds.positive_count <= ds.negative_count else -1


def random_oversample(ds: Dataset, seed) -> Dataset:
    """Duplicate minority examples (with replacement) until classes are equal."""
    _require_both_classes(ds)
    minority = _minority_label(ds)
    min_idx = np.flatnonzero(ds.y == minority)
    deficit = ds.n - 2 * min_idx.size
    if deficit == 0:
        return ds
    extra = min_idx[_rng(seed).integers(0, min_idx.size, size=deficit)]
    return ds.take(np.concatenate([np.arange(ds.n), extra]))


def random_undersample(ds: Dataset, seed) -> Dataset:
    """Drop majority examples (without replacement) until classes are equal."""
    _require_both_classes(ds)
    minority = _minority_label(ds)
    min_idx = np.flatnonzero(ds.y == minority)
    maj_idx = np.flatnonzero(ds.y != minority)
    if maj_idx.size == min_idx.size:
        return ds
    keep = _rng(seed).choice(maj_idx, size=min_idx.size, replace=False)
    return ds.take(np.sort(np.concatenate([min_idx, keep])))


def smote(ds: Dataset, k_neighbors: int = 5, seed=0) -> Dataset:
    """Synthetic minority oversampling until the classes are balanced.

    Each synthetic point is x_i + u * (x_nn - x_i) with x_i a uniformly
    chosen minority example, x_nn one of its k nearest minority neighbours
    (exact Euclidean search) and u ~ U[0, 1].
    """
    if k_neighbors < 1:
        raise ValueError("k_neighbors must be >= 1")
    _require_both_classes(ds)
    minority = _minority_label(ds)
    Xm = ds.X[ds.y == minority]
    if Xm.shape[0] < 2:
        raise DataError("SMOTE needs at least 2 minority examples")
    deficit = ds.n - 2 * Xm.shape[0]
    if deficit == 0:
        return ds
    k = min(k_neighbors, Xm.shape[0] - 1)
    sq = np.sum((Xm[:, None, :] - Xm[None, :, :]) ** 2, axis=-1)
    np.fill_diagonal(sq, np.inf)
    # stable sort so equidistant neighbours resolve by index
    neighbors = np.argsort(sq, axis=1, kind="stable")[:, :k]

    rng = _rng(seed)
    base = rng.integers(0, Xm.shape[0], size=deficit)
    nn = neighbors[base, rng.integers(0, k, size=deficit)]
    u = rng.random(deficit)[:, None]
    synthetic = Xm[base] + u * (Xm[nn] - Xm[base])
    return Dataset(np.vstack([ds.X, synthetic]),
                   np.concatenate([ds.y, np.full(deficit, minority, dtype=np.int64)]))


def subsample_to_ratio(ds: Dataset, target_ir: float, seed) -> Dataset:
    """Reach a positive-class fraction of ``target_ir`` by dropping examples of one class.

    Raising the ratio drops negatives; lowering it drops positives.
    """
    if not 0.0 < target_ir <= 0.5:
        raise ValueError(f"target_ir must be in (0, 0.5], got {target_ir}")
    _require_both_classes(ds)
    pos_idx = np.flatnonzero(ds.y == 1)
    neg_idx = np.flatnonzero(ds.y == -1)
    p, m = pos_idx.size, neg_idx.size
    rng = _rng(seed)

    if math.isclose(target_ir, p / (p + m), rel_tol=0.0, abs_tol=1e-12):
        return ds
    if target_ir > p / (p + m):
        keep_neg = _round_half_up(p * (1.0 - target_ir) / target_ir)
        keep_neg = min(max(keep_neg, 1), m)
        neg_idx = rng.choice(neg_idx, size=keep_neg, replace=False)
    else:
        keep_pos = _round_half_up(target_ir * m / (1.0 - target_ir))
        if keep_pos < 1:
            raise DataError(f"target_ir={target_ir} implies zero positives with {m} negatives")
        pos_idx = rng.choice(pos_idx, size=min(keep_pos, p), replace=False)
    return ds.take(np.sort(np.concatenate([pos_idx, neg_idx])))
