"""Local q-state Potts model and maximum pseudo-likelihood estimation of beta.

The conditional law of a node's label given its neighbors is a softmax of
``beta * U`` where ``U[l]`` counts the neighbors labeled ``l``. Everything here
works on the ``(n, q)`` histogram matrix, so the per-node terms are vectorized.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .graph import LabeledGraph

log = logging.getLogger(__name__)

CONVERGED = "converged"
NO_INTERIOR_ROOT = "no_interior_root"
NOISE_FLOOR = "noise_floor"


def softmax_weights(U, beta: float) -> np.ndarray:
    """Row-wise ``softmax(beta * U)`` with the row maximum subtracted."""
    z = beta * np.asarray(U, dtype=float)
    z = z - z.max(axis=-1, keepdims=True)
    w = np.exp(z)
    return w / w.sum(axis=-1, keepdims=True)


def local_probability(U, m: int, beta: float) -> float:
    """p(x_i = m | neighbors, beta) for the histogram ``U`` and label ``m`` in 1..q."""
    U = np.asarray(U, dtype=float)
    if not 1 <= m <= U.shape[-1]:
        raise ValueError(f"label {m} outside 1..{U.shape[-1]}")
    return float(softmax_weights(U, beta)[m - 1])


def _own_counts(U: np.ndarray, labels: np.ndarray) -> np.ndarray:
    return U[np.arange(len(labels)), labels - 1].astype(float)


def _log_partition(U: np.ndarray, beta: float) -> np.ndarray:
    z = beta * U
    zmax = z.max(axis=1)
    return zmax + np.log(np.exp(z - zmax[:, None]).sum(axis=1))


def log_pseudo_likelihood(g: LabeledGraph, beta: float) -> float:
    U = g.histograms().astype(float)
    if U.shape[0] == 0:
        return 0.0
    return float(np.sum(beta * _own_counts(U, g.labels) - _log_partition(U, beta)))


def pl_derivative_from_hist(U: np.ndarray, labels: np.ndarray, beta: float) -> float:
    U = np.asarray(U, dtype=float)
    if U.shape[0] == 0:
        return 0.0
    expected = (U * softmax_weights(U, beta)).sum(axis=1)
    return float(_own_counts(U, labels).sum() - expected.sum())


def pl_derivative(g: LabeledGraph, beta: float) -> float:
    """d/dbeta of the log pseudo-likelihood: observed minus expected agreement."""
    return pl_derivative_from_hist(g.histograms(), g.labels, beta)


@dataclass(frozen=True)
class EstimatorConfig:
    beta0: float = 0.0
    beta1: float = 1.0
    tol: float = 1e-6
    max_iter: int = 100
    beta_max: float = 10.0
    clamp_negative: bool = True


@dataclass(frozen=True)
class EstimationResult:
    beta_mpl: float
    iterations: int
    residual: float
    status: str = CONVERGED
    beta_used: float = math.nan
    clamped: bool = False

    @property
    def interior_root(self) -> bool:
        return self.status == CONVERGED


def _secant(f, x0, x1, tol, max_iter, bound):
    """Plain secant iteration. Returns (x, f(x), iterations, ok)."""
    f0, f1 = f(x0), f(x1)
    if abs(f0) < tol:
        return x0, f0, 0, True
    for it in range(1, max_iter + 1):
        if abs(f1) < tol:
            return x1, f1, it - 1, True
        if f1 == f0:
            return x1, f1, it, False
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not math.isfinite(x2) or abs(x2) > bound:
            return x2, math.nan, it, False
        x0, f0 = x1, f1
        x1, f1 = x2, f(x2)
        if abs(x1 - x0) < tol:
            return x1, f1, it, True
    return x1, f1, max_iter, False


def _bisect(f, a, b, fa, tol, max_iter=200):
    for it in range(max_iter):
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0 or (b - a) < tol:
            return m, fm, it
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return m, fm, max_iter


def estimate_beta_from_hist(U, labels, config: EstimatorConfig = EstimatorConfig()) -> EstimationResult:
    """Root of the pseudo-likelihood equation by the secant method.

    A secant answer only counts as a root if the derivative is exactly 0 there
    or changes sign within ``1e-3`` of it; a derivative that merely decays
    towards 0 (saturated fields) is not a root. When the secant iterates leave
    ``[-beta_max, beta_max]``, stall or fail that check, the sign
    of the derivative on ``[0, beta_max]`` decides the outcome: a bracketed
    root is polished by bisection, a derivative that stays positive saturates
    at ``beta_max`` and one that is negative from the start is floored at 0
    (if ``clamp_negative``).
    """
    U = np.asarray(U, dtype=float)
    labels = np.asarray(labels, dtype=np.int64)

    def f(b):
        return pl_derivative_from_hist(U, labels, b)

    c = config
    x, fx, it, ok = _secant(f, c.beta0, c.beta1, c.tol, c.max_iter, c.beta_max)
    if ok and fx != 0:
        lo, hi = f(x - 1e-3), f(x + 1e-3)
        ok = (lo >= 0 >= hi) or (lo <= 0 <= hi)
    if ok and abs(x) <= c.beta_max:
        if not (x < 0 and c.clamp_negative):
            return EstimationResult(float(x), it, float(fx), CONVERGED)

    grid = np.linspace(0.0, c.beta_max, 41)
    vals = np.array([f(b) for b in grid])
    assert np.all(np.isfinite(vals)), "non-finite pseudo-likelihood derivative"
    if vals[0] < 0 and c.clamp_negative:
        log.warning("pseudo-likelihood decreasing at beta=0; flooring estimate at 0")
        return EstimationResult(0.0, it, float(vals[0]), NOISE_FLOOR)
    change = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]
    if len(change):
        k = change[0]
        root, froot, extra = _bisect(f, grid[k], grid[k + 1], vals[k], c.tol)
        return EstimationResult(float(root), it + extra, float(froot), CONVERGED)
    if vals[-1] > 0:
        log.warning("no interior root on [0, %g]; saturating beta", c.beta_max)
        return EstimationResult(float(c.beta_max), it, float(vals[-1]), NO_INTERIOR_ROOT)
    # negative everywhere on [0, beta_max] and negatives allowed
    return EstimationResult(float(x) if ok else -float(c.beta_max), it,
                            float(fx) if ok else float(f(-c.beta_max)),
                            CONVERGED if ok else NO_INTERIOR_ROOT)


def estimate_beta(g: LabeledGraph, config: EstimatorConfig = EstimatorConfig()) -> EstimationResult:
    return estimate_beta_from_hist(g.histograms(), g.labels, config)


def critical_beta(q: int) -> float:
    """Critical inverse temperature ln(1 + sqrt(q)) of the q-state Potts model."""
    if q < 2:
        raise ValueError("q must be at least 2")
    return math.log1p(math.sqrt(q))


def clamp_beta(beta_mpl: float, q: int, mode: str = "critical", allow_negative: bool = False) -> float:
    if not math.isfinite(beta_mpl):
        raise ValueError("beta estimate must be finite")
    if mode == "critical":
        beta = min(critical_beta(q), beta_mpl)
    elif mode == "none":
        beta = beta_mpl
    else:
        raise ValueError(f"unknown clamp mode {mode!r}")
    if beta < 0 and not allow_negative:
        log.warning("negative beta estimate %.6g mapped to 0", beta)
        beta = 0.0
    return float(beta)


def resolve_beta(g: LabeledGraph, mode: str = "critical", config: EstimatorConfig = EstimatorConfig(),
                 allow_negative: bool = False) -> EstimationResult:
    """Estimate beta and apply the clamp; fills ``beta_used`` and ``clamped``."""
    if allow_negative and config.clamp_negative:
        config = EstimatorConfig(**{**config.__dict__, "clamp_negative": False})
    est = estimate_beta(g, config)
    used = clamp_beta(est.beta_mpl, g.q, mode, allow_negative)
    return EstimationResult(est.beta_mpl, est.iterations, est.residual, est.status,
                            used, used != est.beta_mpl)
