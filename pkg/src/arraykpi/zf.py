"""Zero-forcing combining and the gain/correlation decomposition of the SINR.

With channels normalized to a reference array and equal transmit powers
``P_UL / N_ref`` (unit noise power), the uplink SINR of UE ``k`` is

    SINR_k = P_UL G_k |w_kk|^2 / (P_UL sum_{i != k} G_i |w_ki|^2 + 1)

where ``G_k`` is the instantaneous element gain (IEG) and ``w_ki`` the
beamforming-channel correlation (BCC). For ZF the interference terms vanish
and ``|w_kk|^2 = 1 - GSCC_k``.
"""

from __future__ import annotations

import numpy as np
from scipy import linalg

from .errors import ConfigurationError, DegenerateChannelError, DomainError, SingularChannelError

__all__ = [
    "COND_LIMIT",
    "zf_combiner",
    "bcc",
    "bcc_matrix",
    "gscc",
    "projection_split",
    "projection_split_all",
    "ieg",
    "sinr_general",
    "sinr_decomposed",
    "sinr_zf",
    "rate",
    "db",
]

COND_LIMIT = 1e12


def db(x):
    return 10 * np.log10(x)


def _check_columns(H):
    norms = np.linalg.norm(H, axis=0)
    if np.any(norms == 0):
        raise DegenerateChannelError(f"zero channel for UE(s) {np.flatnonzero(norms == 0).tolist()}")
    return norms


def zf_combiner(H, cond_limit: float = COND_LIMIT, return_cond: bool = False):
    """ZF combining matrix ``W = H (H^H H)^-1`` via a thin QR factorization.

    With ``H = Q R`` the combiner is ``W = Q R^-H``, which avoids forming the
    Gram matrix.

    Raises:
        SingularChannelError: If the condition number of ``H`` exceeds
            ``cond_limit``.
    """
    H = np.asarray(H, dtype=complex)
    n, k = H.shape
    if k > n:
        raise ConfigurationError(f"ZF needs K <= N, got K={k}, N={n}")
    _check_columns(H)
    Q, R = np.linalg.qr(H)
    sv = np.linalg.svd(R, compute_uv=False)
    cond = sv[0] / sv[-1] if sv[-1] > 0 else np.inf
    if not cond <= cond_limit:
        raise SingularChannelError(f"channel condition number {cond:.3g} exceeds {cond_limit:.3g}")
    W = linalg.solve_triangular(R, Q.conj().T, lower=False).conj().T
    return (W, cond) if return_cond else W


def bcc(w, h) -> complex:
    """Normalized correlation ``w^H h / (||w|| ||h||)``."""
    w = np.asarray(w)
    h = np.asarray(h)
    nw, nh = np.linalg.norm(w), np.linalg.norm(h)
    if nw == 0 or nh == 0:
        raise DegenerateChannelError("BCC undefined for a zero vector")
    return complex(np.vdot(w, h) / (nw * nh))


def bcc_matrix(W, H):
    """All correlations; entry ``[k, i]`` is the BCC between ``w_k`` and ``h_i``."""
    nw = _check_columns(W)
    nh = _check_columns(H)
    return (W.conj().T @ H) / np.outer(nw, nh)


def projection_split(H, k: int):
    """Split ``h_k`` against the span of the other columns.

    Returns:
        ``(gscc, residual)`` with ``gscc = ||P h_k||^2 / ||h_k||^2`` for the
        orthogonal projector ``P`` onto the interference subspace and
        ``residual = ||(I - P) h_k||^2 / ||h_k||^2``. Both are computed
        directly, so a small residual keeps its relative accuracy.
    """
    H = np.asarray(H, dtype=complex)
    h = H[:, k]
    nh = np.linalg.norm(h)
    if nh == 0:
        raise DegenerateChannelError(f"zero channel for UE {k}")
    h = h / nh
    others = np.delete(H, k, axis=1)
    if others.shape[1] == 0:
        return 0.0, 1.0
    _check_columns(others)
    basis = linalg.orth(others)
    coef = basis.conj().T @ h
    resid = h - basis @ coef
    g = float(np.real(np.vdot(coef, coef)))
    r = float(np.real(np.vdot(resid, resid)))
    return min(g, 1.0), min(r, 1.0)


def projection_split_all(H):
    """:func:`projection_split` for every column at once.

    Uses one stacked thin QR of the ``K`` interference matrices, so the
    interferers of each UE must be linearly independent (which holds
    whenever ``H`` has full column rank).
    """
    H = np.asarray(H, dtype=complex)
    n, k = H.shape
    norms = _check_columns(H)
    Hn = H / norms
    if k == 1:
        return np.zeros(1), np.ones(1)
    keep = ~np.eye(k, dtype=bool)
    others = np.stack([Hn[:, keep[j]] for j in range(k)])  # (K, N, K-1)
    Q, _ = np.linalg.qr(others)
    coef = np.einsum("knm,kn->km", Q.conj(), Hn.T)
    resid = Hn.T - np.einsum("knm,km->kn", Q, coef)
    g = np.sum(np.abs(coef) ** 2, axis=1)
    r = np.sum(np.abs(resid) ** 2, axis=1)
    return np.minimum(g, 1.0), np.minimum(r, 1.0)


def gscc(H, k: int) -> float:
    """Squared cosine of the angle between ``h_k`` and the other channels' span."""
    return projection_split(H, k)[0]


def ieg(h, h_ref):
    """Instantaneous element gain ``||h||^2 / ||h_ref||^2`` (column-wise for matrices)."""
    h = np.asarray(h)
    h_ref = np.asarray(h_ref)
    den = np.sum(np.abs(h_ref) ** 2, axis=0)
    if np.any(den == 0):
        raise DegenerateChannelError("reference channel has zero norm")
    return np.sum(np.abs(h) ** 2, axis=0) / den


def sinr_general(H, W, powers, noise: float = 1.0, return_terms: bool = False):
    """Per-UE SINR from channels, combiners, powers and noise power.

    ``return_terms`` additionally returns ``(signal, interference, noise)``
    arrays.
    """
    H = np.asarray(H)
    W = np.asarray(W)
    powers = np.broadcast_to(np.asarray(powers, dtype=float), (H.shape[1],))
    if not noise > 0:
        raise DomainError("noise power must be positive")
    G = np.abs(W.conj().T @ H) ** 2 * powers  # [k, i] = p_i |w_k^H h_i|^2
    signal = np.diag(G).copy()
    interference = G.sum(axis=1) - signal
    noise_term = noise * np.sum(np.abs(W) ** 2, axis=0)
    sinr = signal / (interference + noise_term)
    if return_terms:
        return sinr, (signal, interference, noise_term)
    return sinr


def sinr_decomposed(ieg_values, bcc_sq, p_ul: float):
    """SINR from IEGs and squared BCCs ``bcc_sq[k, i] = |w_ki|^2``."""
    g = np.asarray(ieg_values, dtype=float)
    B = np.asarray(bcc_sq, dtype=float)
    if np.any(g < 0):
        raise DomainError("IEG must be non-negative")
    if np.any((B < 0) | (B > 1 + 1e-12)):
        raise DomainError("squared BCC must lie in [0, 1]")
    weighted = B * g[None, :]
    signal = np.diag(weighted)
    interference = weighted.sum(axis=1) - signal
    return p_ul * signal / (p_ul * interference + 1.0)


def sinr_zf(ieg_values, gscc_values, p_ul: float):
    """ZF SINR ``P_UL G_k (1 - GSCC_k)``."""
    return p_ul * np.asarray(ieg_values) * (1.0 - np.asarray(gscc_values))


def rate(sinr):
    """Spectral efficiency ``log2(1 + SINR)`` in bit/s/Hz."""
    sinr = np.asarray(sinr, dtype=float)
    if np.any(sinr < 0):
        raise DomainError("SINR must be non-negative")
    out = np.log2(1.0 + sinr)
    return float(out) if out.ndim == 0 else out
