"""Empirical C-Bound: Gibbs risk, expected disagreement and their ratio.

For a posterior ``q`` over K voters, a per-voter risk vector ``r`` and a
pairwise disagreement matrix ``m`` (both measured under an example
distribution), the quantity maximized during training is

    objective(q) = (1 - 2 r.q)^2 / (1 - 2 q'mq)

and the C-Bound on the majority-vote risk is ``1 - objective(q)``, valid
when the Gibbs risk ``r.q`` is at most 1/2.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import nnls

from .vote import SIMPLEX_ATOL, VoteMatrix, check_simplex, uniform

log = logging.getLogger(__name__)

DENOMINATOR_EPS = 1e-9


class DegenerateDenominatorError(ArithmeticError):
    """1 - 2 * disagreement fell below the guard; the bound diverges there."""


class BoundInapplicableError(ValueError):
    """Gibbs risk above 1/2, where the C-Bound does not hold."""


def check_distribution(dist, n: int) -> np.ndarray:
    dist = np.asarray(dist, dtype=float)
    if dist.shape != (n,):
        raise ValueError(f"distribution has shape {dist.shape}, expected ({n},)")
    if np.any(dist < 0) or abs(dist.sum() - 1.0) > SIMPLEX_ATOL:
        raise ValueError("example distribution must be non-negative and sum to 1")
    return dist


def _check_qr(q, r) -> tuple[np.ndarray, np.ndarray]:
    q = np.asarray(q, dtype=float)
    r = np.asarray(r, dtype=float)
    if q.shape != r.shape:
        raise ValueError(f"weights {q.shape} and risks {r.shape} differ in length")
    return q, r


def _check_qm(q, m) -> tuple[np.ndarray, np.ndarray]:
    q = np.asarray(q, dtype=float)
    m = np.asarray(m, dtype=float)
    if m.shape != (q.size, q.size):
        raise ValueError(f"disagreement matrix {m.shape} does not match {q.size} weights")
    return q, m


def risk_vector(v: VoteMatrix, dist) -> np.ndarray:
    """r[k] = sum_i dist[i] * [h[i, k] != y[i]]."""
    dist = check_distribution(dist, v.n)
    return dist @ (v.h != v.labels[:, None])


def disagreement_matrix(v: VoteMatrix, dist) -> np.ndarray:
    """m[k, k'] = sum_i dist[i] * [h[i, k] != h[i, k']]."""
    dist = check_distribution(dist, v.n)
    h = v.h.astype(float)
    # [a != b] = (1 - a*b) / 2 for a, b in {-1, +1}
    m = 0.5 * (dist.sum() - h.T @ (h * dist[:, None]))
    m = 0.5 * (m + m.T)
    np.fill_diagonal(m, 0.0)
    return np.clip(m, 0.0, 1.0)


def gibbs_risk(q, r) -> float:
    q, r = _check_qr(q, r)
    return float(q @ r)


def expected_disagreement(q, m) -> float:
    q, m = _check_qm(q, m)
    return float(q @ m @ q)


def objective(q, r, m) -> float:
    """(1 - 2G)^2 / (1 - 2d); raises if the denominator is below the guard."""
    q, r = _check_qr(q, r)
    q, m = _check_qm(q, m)
    den = 1.0 - 2.0 * float(q @ m @ q)
    if den < DENOMINATOR_EPS:
        raise DegenerateDenominatorError(f"1 - 2*disagreement = {den:.3g} is below {DENOMINATOR_EPS}")
    return (1.0 - 2.0 * float(q @ r)) ** 2 / den


def cbound_value(q, r, m) -> float:
    g = gibbs_risk(q, r)
    if g > 0.5:
        raise BoundInapplicableError(f"Gibbs risk {g:.6f} exceeds 1/2")
    return 1.0 - objective(q, r, m)


def cbound_gradient(q, r, m) -> np.ndarray:
    """Gradient of :func:`objective` with respect to q (unconstrained)."""
    q, r = _check_qr(q, r)
    q, m = _check_qm(q, m)
    mq = m @ q
    den = 1.0 - 2.0 * float(q @ mq)
    if den < DENOMINATOR_EPS:
        raise DegenerateDenominatorError(f"1 - 2*disagreement = {den:.3g} is below {DENOMINATOR_EPS}")
    a = 1.0 - 2.0 * float(q @ r)
    return (-4.0 * a * den * r + 4.0 * a * a * mq) / den ** 2


def project_simplex(v) -> np.ndarray:
    """Euclidean projection onto {q : q >= 0, sum q = 1} (sort-and-threshold)."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("need a non-empty vector")
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    j = np.arange(1, v.size + 1)
    rho = np.nonzero(u - (css - 1.0) / j > 0)[0][-1]
    theta = (css[rho] - 1.0) / (rho + 1)
    w = np.maximum(v - theta, 0.0)
    s = w.sum()
    if abs(s - 1.0) > 1e-12:
        w = w / s
    return w


def margin_moments(q, v: VoteMatrix, dist) -> tuple[float, float, float]:
    """First and second moments of the margin y * sum_k q_k h_k(x), and its variance."""
    q = check_simplex(q)
    if q.size != v.k:
        raise ValueError(f"{q.size} weights for {v.k} voters")
    dist = check_distribution(dist, v.n)
    s = v.scores(q)
    mu1 = float(dist @ (v.labels * s))
    mu2 = float(dist @ (s * s))
    return mu1, mu2, mu2 - mu1 * mu1


@dataclass(frozen=True)
class OptimizerConfig:
    tol: float = 1e-10
    max_iter: int = 1000
    restarts: int = 4
    initial_step: float = 1.0
    shrink: float = 0.5
    armijo: float = 1e-4
    min_step: float = 1e-16
    seed: int = 0
    # also start from the global maximizer found by nonnegative least squares
    nnls_start: bool = True


@dataclass
class OptimizeResult:
    q: np.ndarray
    objective: float
    init_objective: float
    iterations: int
    status: str
    trace: list = field(default_factory=list, repr=False)

    @property
    def cbound(self) -> float:
        return 1.0 - self.objective


def _safe_objective(q, r, m) -> float:
    mq = m @ q
    den = 1.0 - 2.0 * float(q @ mq)
    if den < DENOMINATOR_EPS:
        return -np.inf
    return (1.0 - 2.0 * float(q @ r)) ** 2 / den


def _ascend(q, r, m, cfg: OptimizerConfig, run: int, trace: list):
    """Projected gradient ascent with Armijo backtracking from ``q``."""
    f = _safe_objective(q, r, m)
    if not np.isfinite(f):
        return q, f, 0, "degenerate"
    trace.append((run, 0, f, 0.0))
    for it in range(1, cfg.max_iter + 1):
        g = cbound_gradient(q, r, m)
        step = cfg.initial_step
        while True:
            q_new = project_simplex(q + step * g)
            f_new = _safe_objective(q_new, r, m)
            if f_new >= f + cfg.armijo * float(g @ (q_new - q)):
                break
            step *= cfg.shrink
            if step < cfg.min_step:
                return q, f, it, "converged"
        improvement = f_new - f
        move = float(np.max(np.abs(q_new - q)))
        q, f = q_new, f_new
        trace.append((run, it, f, step))
        if improvement < cfg.tol or move < cfg.tol:
            return q, f, it, "converged"
    return q, f, cfg.max_iter, "max_iter"


def nnls_maximizers(r, m) -> list[np.ndarray]:
    """Simplex points maximizing the objective on each side of 1 - 2 r.q = 0.

    With a = 1 - 2r and S = 1 - 2m (the second-moment matrix of the signed
    votes), the objective on the simplex is (a.q)^2 / q'Sq. It is invariant
    to rescaling q, and min over x >= 0 of x'Sx - 2 s a.x equals
    -max (a.x)^2 / x'Sx over the x with s a.x > 0, so one NNLS solve per sign
    s finds the global maximum. Sides with no such x are omitted.
    """
    r = np.asarray(r, dtype=float)
    a = 1.0 - 2.0 * r
    s_mat = 1.0 - 2.0 * np.asarray(m, dtype=float)
    np.fill_diagonal(s_mat, 1.0)
    evals, evecs = np.linalg.eigh(0.5 * (s_mat + s_mat.T))
    keep = evals > evals.max() * 1e-12
    # x'Sx - 2 s a.x = |A x - s b|^2 - |b|^2 with A'A = S and A'b = a on range(S)
    A = np.sqrt(evals[keep])[:, None] * evecs[:, keep].T
    b = (evecs[:, keep].T @ a) / np.sqrt(evals[keep])
    out = []
    for sign in (1.0, -1.0):
        x, _ = nnls(A, sign * b)
        if x.sum() > 0 and sign * float(a @ x) > 0:
            out.append(x / x.sum())
    return out


def optimize_weights(r, m, init=None, config: OptimizerConfig = OptimizerConfig()) -> OptimizeResult:
    """Maximize the C-Bound objective over the simplex.

    Runs projected-gradient ascent from ``init`` (uniform by default) and
    from ``config.restarts`` Dirichlet(1) draws, plus (if
    ``config.nnls_start``) the points returned by :func:`nnls_maximizers`.
    Keeps the best feasible end point, which never scores below ``init``.
    """
    r = np.asarray(r, dtype=float)
    k = r.size
    q0 = uniform(k) if init is None else check_simplex(init, "init").copy()
    _, m = _check_qm(q0, m)
    if q0.size != k:
        raise ValueError(f"init has {q0.size} entries, risk vector has {k}")

    if k == 1:
        f = _safe_objective(np.ones(1), r, m)
        return OptimizeResult(np.ones(1), f, f, 0, "trivial")

    rng = np.random.default_rng(config.seed)
    starts = [q0] + [rng.dirichlet(np.ones(k)) for _ in range(config.restarts)]
    if config.nnls_start:
        starts += nnls_maximizers(r, m)
    trace: list = []
    init_f = _safe_objective(q0, r, m)
    best = None
    total_iter = 0
    for run, start in enumerate(starts):
        q, f, n_iter, status = _ascend(start, r, m, config, run, trace)
        total_iter += n_iter
        if status == "degenerate":
            continue
        if best is None or f > best[1]:
            best = (q, f, status)

    if best is None:
        log.warning("every start hit the degenerate-denominator guard; returning init")
        return OptimizeResult(q0, init_f, init_f, total_iter, "degenerate", trace)
    q, f, status = best
    return OptimizeResult(q, f, init_f, total_iter, status, trace)


def write_trace(trace, path) -> None:
    """Optimizer trace rows (run, iteration, objective, step) as CSV."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["run", "iteration", "objective", "step"])
        for row in trace:
            w.writerow([row[0], row[1], repr(float(row[2])), repr(float(row[3]))])


def bound_summary(q, r, m) -> dict:
    """Gibbs risk, disagreement, objective and C-Bound at q, flagging applicability."""
    g = gibbs_risk(q, r)
    d = expected_disagreement(q, m)
    obj = _safe_objective(np.asarray(q, dtype=float), r, m)
    return {
        "gibbs_risk": g,
        "disagreement": d,
        "objective": float(obj),
        "cbound": float(1.0 - obj),
        "bound_applicable": bool(g <= 0.5 and np.isfinite(obj)),
    }
