"""Imbalance-aware evaluation: F1, precision-recall curve, Average Precision,
and the two-sided Wilcoxon rank-sum test used for significance marks."""

from __future__ import annotations

import csv
import itertools
import math
from pathlib import Path
from typing import NamedTuple

import numpy as np

EXACT_WILCOXON_MAX_N = 12


def _labels(labels) -> np.ndarray:
    labels = np.asarray(labels)
    if not np.all((labels == 1) | (labels == -1)):
        raise ValueError("labels must be -1 or +1")
    return labels


def f1_score(predictions, labels) -> float:
    """Harmonic mean of precision and recall for the +1 class; 0 when TP = 0."""
    predictions = _labels(predictions)
    labels = _labels(labels)
    if predictions.shape != labels.shape:
        raise ValueError(f"{predictions.shape} predictions vs {labels.shape} labels")
    if not np.any(labels == 1):
        raise ValueError("F1 is undefined without positive labels")
    tp = int(np.sum((predictions == 1) & (labels == 1)))
    fp = int(np.sum((predictions == 1) & (labels == -1)))
    fn = int(np.sum((predictions == -1) & (labels == 1)))
    if tp == 0:
        return 0.0
    return 2.0 * tp / (2.0 * tp + fp + fn)


def pr_curve(scores, labels) -> list[tuple[float, float]]:
    """(recall, precision) at each distinct score, highest first; tied scores enter together.

    Thresholds above the first positive (recall 0, precision 0) are left
    out; they add nothing to the area.
    """
    scores = np.asarray(scores, dtype=float)
    labels = _labels(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError(f"{scores.shape} scores vs {labels.shape} labels")
    n_pos = int(np.sum(labels == 1))
    if n_pos == 0:
        raise ValueError("precision-recall curve needs at least one positive label")
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    tp = np.cumsum(labels[order] == 1)
    # last index of each block of equal scores
    ends = np.flatnonzero(np.r_[s[1:] != s[:-1], True])
    ends = ends[tp[ends] > 0]
    tp_at = tp[ends]
    predicted = ends + 1
    return [(float(t / n_pos), float(t / p)) for t, p in zip(tp_at, predicted)]


def average_precision(scores, labels) -> float:
    """Step-wise area under the PR curve: sum of (R_n - R_{n-1}) * P_n."""
    ap, prev_r = 0.0, 0.0
    for r, p in pr_curve(scores, labels):
        ap += (r - prev_r) * p
        prev_r = r
    return ap


def write_pr_curve(scores, labels, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["recall", "precision"])
        for r, p in pr_curve(scores, labels):
            w.writerow([repr(r), repr(p)])


def midranks(values) -> np.ndarray:
    """1-based ranks with ties given the mean of the ranks they span."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    sorted_vals = values[order]
    ranks = np.empty(values.size)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


class RankSumResult(NamedTuple):
    statistic: float
    p_value: float
    exact: bool


def wilcoxon_rank_sum(a, b) -> RankSumResult:
    """Two-sided rank-sum test; the statistic is the rank sum of ``a``.

    Small samples (combined size <= 12) use the exact permutation
    distribution of the observed midranks; larger ones the normal
    approximation with tie and continuity corrections.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be non-empty")
    na, nb = a.size, b.size
    n = na + nb
    ranks = midranks(np.concatenate([a, b]))
    w = float(ranks[:na].sum())
    mean = na * (n + 1) / 2.0
    dev = abs(w - mean)

    if n <= EXACT_WILCOXON_MAX_N:
        hits = total = 0
        for subset in itertools.combinations(range(n), na):
            total += 1
            if abs(ranks[list(subset)].sum() - mean) >= dev - 1e-9:
                hits += 1
        return RankSumResult(w, hits / total, True)

    _, counts = np.unique(ranks, return_counts=True)
    tie_term = float(np.sum(counts ** 3 - counts)) / (n * (n - 1))
    var = na * nb / 12.0 * ((n + 1) - tie_term)
    if var <= 0:
        return RankSumResult(w, 1.0, False)
    z = max(dev - 0.5, 0.0) / math.sqrt(var)
    return RankSumResult(w, min(1.0, math.erfc(z / math.sqrt(2.0))), False)
