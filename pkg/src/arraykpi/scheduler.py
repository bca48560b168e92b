"""Correlation-threshold user dropping."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

__all__ = ["DropDecision", "channel_correlation", "drop_users"]

# Pairs this close to unit correlation count as collinear for any threshold.
_COLLINEAR_ATOL = 1e-12


@dataclass(frozen=True)
class DropDecision:
    served: np.ndarray
    n_dropped: int
    max_residual_correlation: float


def channel_correlation(H):
    """Matrix of ``|h_i^H h_j| / (||h_i|| ||h_j||)`` with a zero diagonal."""
    H = np.asarray(H)
    norms = np.linalg.norm(H, axis=0)
    C = np.abs(H.conj().T @ H) / np.outer(norms, norms)
    np.fill_diagonal(C, 0.0)
    return C


def _violates(corr, threshold):
    return (corr > threshold) | (corr >= 1.0 - _COLLINEAR_ATOL)


def drop_users(H, threshold: float = 0.45) -> DropDecision:
    """Greedily drop UEs until all served pairs have correlation <= ``threshold``.

    Each step takes the most correlated violating pair and drops the member
    with more violating partners among the served UEs. Ties go to the UE
    with the smaller channel norm, then to the smaller index.
    """
    if not 0 < threshold <= 1:
        raise ConfigurationError(f"threshold must be in (0, 1], got {threshold}")
    H = np.asarray(H)
    k = H.shape[1]
    corr = channel_correlation(H)
    norms = np.linalg.norm(H, axis=0)
    served = np.ones(k, dtype=bool)

    while True:
        active = np.outer(served, served)
        bad = _violates(corr, threshold) & active
        np.fill_diagonal(bad, False)
        if not bad.any():
            break
        masked = np.where(bad, corr, -1.0)
        i, j = np.unravel_index(np.argmax(masked), masked.shape)  # first max in row-major order
        i, j = min(i, j), max(i, j)
        partners = bad.sum(axis=1)
        if partners[i] != partners[j]:
            victim = i if partners[i] > partners[j] else j
        elif norms[i] != norms[j]:
            victim = i if norms[i] < norms[j] else j
        else:
            victim = i
        served[victim] = False

    idx = np.flatnonzero(served)
    sub = corr[np.ix_(idx, idx)]
    max_corr = float(sub.max()) if len(idx) > 1 else 0.0
    return DropDecision(served, int(k - served.sum()), max_corr)
