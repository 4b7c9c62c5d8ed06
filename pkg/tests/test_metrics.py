import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from damvi.metrics import (average_precision, f1_score, midranks, pr_curve, wilcoxon_rank_sum,
                           write_pr_curve)


def brute_ap(scores, labels):
    """Step-wise AP from scratch: every distinct score as a threshold, counting directly."""
    scores = np.asarray(scores, float)
    labels = np.asarray(labels)
    n_pos = np.sum(labels == 1)
    ap, prev = 0.0, 0.0
    for t in sorted(set(scores.tolist()), reverse=True):
        sel = scores >= t
        tp = np.sum(sel & (labels == 1))
        rec = tp / n_pos
        ap += (rec - prev) * tp / np.sum(sel)
        prev = rec
    return ap


def rank_ap(scores, labels):
    """Mean precision at the rank of each positive (tie-free scores only)."""
    order = np.argsort(-np.asarray(scores, float))
    lab = np.asarray(labels)[order]
    hits = np.cumsum(lab == 1)
    return float(np.mean([hits[i] / (i + 1) for i in range(len(lab)) if lab[i] == 1]))


def brute_rank_sum_p(a, b):
    """Exact two-sided p by enumerating all group assignments with a bitmask."""
    pooled = np.r_[a, b]
    ranks = stats.rankdata(pooled)
    n, na = pooled.size, len(a)
    mean = na * (n + 1) / 2
    obs = abs(ranks[:na].sum() - mean)
    hits = total = 0
    for mask in range(1 << n):
        if bin(mask).count("1") != na:
            continue
        s = sum(ranks[i] for i in range(n) if mask >> i & 1)
        total += 1
        hits += abs(s - mean) >= obs - 1e-9
    return hits / total


class TestF1:
    def test_examples(self):
        assert f1_score([1, -1, 1], [1, -1, 1]) == 1.0
        assert f1_score([-1, -1, -1], [1, -1, 1]) == 0.0
        # TP=2, FP=1, FN=2
        pred = [1, 1, 1, -1, -1, -1]
        lab = [1, 1, -1, 1, 1, -1]
        assert f1_score(pred, lab) == pytest.approx(4 / 7)

    def test_errors(self):
        with pytest.raises(ValueError):
            f1_score([1, -1], [1])
        with pytest.raises(ValueError):
            f1_score([1, -1], [-1, -1])

    @given(st.lists(st.tuples(st.sampled_from([-1, 1]), st.sampled_from([-1, 1])), min_size=1, max_size=30),
           st.randoms())
    def test_permutation_invariant(self, pairs, rnd):
        pred, lab = map(list, zip(*pairs))
        if 1 not in lab:
            return
        idx = list(range(len(pred)))
        rnd.shuffle(idx)
        assert f1_score(pred, lab) == f1_score([pred[i] for i in idx], [lab[i] for i in idx])


class TestPR:
    def test_example(self):
        pts = pr_curve([0.9, 0.8, 0.7], [1, -1, 1])
        assert pts == pytest.approx([(0.5, 1.0), (0.5, 0.5), (1.0, 2 / 3)])
        assert average_precision([0.9, 0.8, 0.7], [1, -1, 1]) == pytest.approx(0.5 + 0.5 * 2 / 3)

    def test_perfect_ranking(self):
        s, y = [0.9, 0.8, 0.1, 0.0], [1, 1, -1, -1]
        assert (1.0, 1.0) in pr_curve(s, y)
        assert average_precision(s, y) == 1.0

    def test_all_tied(self):
        assert pr_curve([0.3] * 4, [1, -1, -1, 1]) == [(1.0, 0.5)]

    def test_no_positive(self):
        with pytest.raises(ValueError):
            pr_curve([0.1, 0.2], [-1, -1])

    def test_csv(self, tmp_path):
        write_pr_curve([0.9, 0.8, 0.7], [1, -1, 1], tmp_path / "pr.csv")
        lines = (tmp_path / "pr.csv").read_text().splitlines()
        assert lines[0] == "recall,precision" and len(lines) == 4

    @given(st.lists(st.tuples(st.integers(0, 5), st.sampled_from([-1, 1])), min_size=1, max_size=25))
    def test_curve_properties(self, pairs):
        s, y = map(list, zip(*pairs))
        if 1 not in y:
            return
        pts = pr_curve(s, y)
        rec = [r for r, _ in pts]
        assert rec == sorted(rec) and rec[-1] == 1.0
        assert all(0 < p <= 1 for _, p in pts)
        assert average_precision(s, y) == pytest.approx(brute_ap(s, y), abs=1e-12)

    @given(st.lists(st.floats(-1, 1), min_size=1, max_size=25, unique=True), st.randoms())
    def test_rank_definition_tie_free(self, scores, rnd):
        y = [rnd.choice([-1, 1]) for _ in scores]
        if 1 not in y:
            return
        assert average_precision(scores, y) == pytest.approx(rank_ap(scores, y), abs=1e-12)


class TestWilcoxon:
    def test_identical(self):
        assert wilcoxon_rank_sum([1, 2, 3], [1, 2, 3]).p_value >= 0.99
        assert wilcoxon_rank_sum([.5] * 8, [.5] * 8).p_value >= 0.99

    def test_extreme(self):
        res = wilcoxon_rank_sum([1, 2, 3], [4, 5, 6])
        assert res.statistic == 6 and res.exact
        assert res.p_value == pytest.approx(0.1)
        assert brute_rank_sum_p([1, 2, 3], [4, 5, 6]) == pytest.approx(0.1)

    def test_empty(self):
        with pytest.raises(ValueError):
            wilcoxon_rank_sum([], [1.0])

    def test_midranks(self):
        np.testing.assert_array_equal(midranks([3, 1, 3, 2]), [3.5, 1, 3.5, 2])

    @given(st.lists(st.integers(0, 6), min_size=1, max_size=6), st.lists(st.integers(0, 6), min_size=1, max_size=6))
    def test_exact_matches_enumeration(self, a, b):
        res = wilcoxon_rank_sum(a, b)
        assert res.exact
        assert res.p_value == pytest.approx(brute_rank_sum_p(a, b), abs=1e-12)

    @given(st.lists(st.floats(-5, 5), min_size=1, max_size=6, unique=True),
           st.lists(st.floats(-5, 5), min_size=1, max_size=6, unique=True))
    def test_exact_matches_scipy_without_ties(self, a, b):
        if set(a) & set(b):
            return
        ours = wilcoxon_rank_sum(a, b).p_value
        theirs = stats.mannwhitneyu(a, b, alternative="two-sided", method="exact").pvalue
        assert ours == pytest.approx(theirs, abs=1e-12)

    @given(st.lists(st.integers(0, 20), min_size=5, max_size=30),
           st.lists(st.integers(0, 20), min_size=8, max_size=30))
    def test_normal_matches_scipy(self, a, b):
        if len(set(a + b)) < 2:
            return
        res = wilcoxon_rank_sum(a, b)
        assert not res.exact
        theirs = stats.mannwhitneyu(a, b, alternative="two-sided", method="asymptotic", use_continuity=True)
        assert res.p_value == pytest.approx(theirs.pvalue, rel=1e-9, abs=1e-12)

    @given(st.lists(st.integers(-50, 50), min_size=1, max_size=6),
           st.lists(st.integers(-50, 50), min_size=1, max_size=6))
    def test_monotone_transform_invariant(self, a, b):
        # x^3 + 2x is strictly increasing and exact on small integers, so ties are preserved
        f = lambda xs: [x ** 3 + 2 * x for x in xs]  # noqa: E731
        r1 = wilcoxon_rank_sum(a, b)
        r2 = wilcoxon_rank_sum(f(a), f(b))
        assert r1.statistic == r2.statistic and r1.p_value == pytest.approx(r2.p_value)
