"""Induced-EMF impedances of parallel thin dipoles and the coupling matrix.

Dipoles are z-oriented, center-fed, with sinusoidal current distributions;
all lengths are in wavelengths. Impedances are referred to the input
terminals (for a half-wave dipole this equals the current-maximum value).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg, special

from .errors import ConfigurationError, DomainError, NumericError, ValidityError

__all__ = [
    "ETA0",
    "ImpedanceSet",
    "CouplingModel",
    "self_impedance",
    "mutual_impedance",
    "impedance_ratio",
    "coupling_matrix",
    "build_mcm",
]

# Free-space wave impedance; 120*pi is the textbook convention for these
# closed forms (73.1 + j42.5 ohm for the half-wave dipole).
ETA0 = 120 * np.pi

DEFAULT_LENGTH = 0.5
DEFAULT_RADIUS = 1e-4


def _expint_f(v):
    """``Ci(v) - j Si(v)``, the antiderivative of ``exp(-jv)/v``."""
    si, ci = special.sici(v)
    return ci - 1j * si


def _parallel_zm(d, length):
    # Mutual impedance between two parallel side-by-side dipoles of equal
    # length, referred to the current maxima. Obtained by integrating the
    # exact near field of one sinusoidal current against the current of the
    # other; each term reduces to differences of Ci - jSi.
    d = np.asarray(d, dtype=float)
    k = 2 * np.pi
    h = length / 2
    kh = k * h
    rho_h = np.hypot(d, h)
    rho_2 = np.hypot(d, 2 * h)
    # R - s written without cancellation for small d.
    m_h = d * d / (rho_h + h)
    m_2 = d * d / (rho_2 + 2 * h)
    F = _expint_f

    t1 = 2 * F(k * d) - F(k * m_h) - F(k * (rho_h + h))
    t2 = np.exp(2j * kh) * (F(k * (rho_2 + 2 * h)) - F(k * (rho_h + h))) + np.exp(-2j * kh) * (
        F(k * m_2) - F(k * m_h)
    )
    t3 = -2 * np.cos(kh) * (
        np.exp(1j * kh) * (F(k * (rho_h + h)) - F(k * d)) + np.exp(-1j * kh) * (F(k * m_h) - F(k * d))
    )
    return ETA0 / (4 * np.pi) * (t1 + t2 + t3)


def _check_length(length):
    if not 0 < length < 1:
        raise ConfigurationError(f"dipole length must be in (0, 1) wavelengths, got {length}")


def mutual_impedance(d, length: float = DEFAULT_LENGTH):
    """Mutual impedance of two parallel side-by-side dipoles.

    Args:
        d: Center-to-center separation in wavelengths (scalar or array).
        length: Dipole length in wavelengths.

    Returns:
        Complex impedance in ohms, referred to the input terminals.
    """
    _check_length(length)
    d_arr = np.asarray(d, dtype=float)
    if np.any(~(d_arr > 0)):
        raise DomainError("separation must be positive")
    z = _parallel_zm(d_arr, length) / np.sin(np.pi * length) ** 2
    return complex(z) if z.ndim == 0 else z


def self_impedance(length: float = DEFAULT_LENGTH, radius: float = DEFAULT_RADIUS) -> complex:
    """Input impedance of an isolated thin dipole by the induced-EMF method.

    The self impedance is the mutual impedance between the wire axis and
    its surface, i.e. the parallel-dipole formula at separation ``radius``.
    """
    _check_length(length)
    if not radius > 0:
        raise ConfigurationError(f"radius must be positive, got {radius}")
    if radius >= length / 10:
        raise ConfigurationError(f"thin-wire assumption violated: radius {radius} >= length/10")
    return complex(_parallel_zm(radius, length) / np.sin(np.pi * length) ** 2)


def impedance_ratio(z_s: complex) -> complex:
    """``Z_s* / (Z_s + Z_s*)``, the voltage division under conjugate matching."""
    return np.conj(z_s) / (z_s + np.conj(z_s))


@dataclass(frozen=True)
class ImpedanceSet:
    Z: np.ndarray
    Z_L: np.ndarray
    Z_s: complex


@dataclass(frozen=True)
class CouplingModel:
    """Direction-independent coupling matrix ``C = Z_L (Z + Z_L)^-1``."""

    C: np.ndarray
    impedance_ratio: complex


def coupling_matrix(positions_wl, length: float = DEFAULT_LENGTH, radius: float = DEFAULT_RADIUS):
    """Impedance matrices and coupling matrix for dipoles at ``positions_wl``.

    Positions are in wavelengths with shape ``(N, 3)``; ``N = 1`` is allowed.
    Only horizontal separations are supported (all dipoles side by side).
    """
    pos = np.atleast_2d(np.asarray(positions_wl, dtype=float))
    n = len(pos)
    if np.ptp(pos[:, 2]) > 1e-12:
        raise ValidityError("dipole coupling model requires all elements in one horizontal plane")
    z_s = self_impedance(length, radius)
    Z = np.full((n, n), z_s, dtype=complex)
    if n > 1:
        iu = np.triu_indices(n, 1)
        dist = np.linalg.norm(pos[iu[0]] - pos[iu[1]], axis=1)
        if np.any(dist <= 0.25):
            raise ValidityError(
                f"minimum element spacing {dist.min():.4g} wavelengths is not above 1/4; "
                "the minimum-scattering dipole model does not apply"
            )
        zm = mutual_impedance(dist, length)
        Z[iu] = zm
        Z[iu[1], iu[0]] = zm
    Z_L = np.conj(z_s) * np.eye(n)

    A = Z + Z_L
    if np.linalg.cond(A) > 1e12:
        raise NumericError("Z + Z_L is numerically singular")
    # C = Z_L A^-1  <=>  A^T C^T = Z_L^T
    C = linalg.solve(A.T, Z_L.T).T
    if not np.all(np.isfinite(C)):
        raise NumericError("non-finite coupling matrix")
    return ImpedanceSet(Z, Z_L, z_s), CouplingModel(C, impedance_ratio(z_s))


def build_mcm(layout, length: float = DEFAULT_LENGTH, radius: float = DEFAULT_RADIUS):
    """Coupling model for an :class:`~arraykpi.geometry.ArrayLayout` of dipoles."""
    return coupling_matrix(layout.positions_wl, length, radius)
