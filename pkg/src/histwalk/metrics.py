"""Distances between sampling distributions and estimation error."""
from __future__ import annotations

import numpy as np


class DivergenceUndefined(ValueError):
    """KL divergence hit a zero probability with smoothing disabled."""


def _pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise ValueError("distributions must be 1-d vectors of equal length")
    if (p < 0).any() or (q < 0).any():
        raise ValueError("probabilities must be nonnegative")
    return p, q


def smooth(p: np.ndarray, epsilon: float) -> np.ndarray:
    s = p + epsilon
    return s / s.sum()


def kl_symmetric(p, q, epsilon: float = 1e-9) -> float:
    """``KL(p||q) + KL(q||p)`` in nats.

    When either vector has a zero entry both are smoothed by adding
    ``epsilon`` to every entry and renormalizing.
    """
    p, q = _pair(p, q)
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    if (p == 0).any() or (q == 0).any():
        if epsilon == 0:
            raise DivergenceUndefined("zero probability entry and epsilon = 0")
        p, q = smooth(p, epsilon), smooth(q, epsilon)
    log_ratio = np.log(p) - np.log(q)
    return float(np.sum((p - q) * log_ratio))


def l2_distance(p, q) -> float:
    p, q = _pair(p, q)
    return float(np.linalg.norm(p - q))


def total_variation(p, q) -> float:
    p, q = _pair(p, q)
    return float(0.5 * np.abs(p - q).sum())


def relative_error(estimate: float, truth: float) -> float:
    if truth == 0:
        raise ZeroDivisionError("relative error undefined for zero ground truth")
    return abs(estimate - truth) / abs(truth)
