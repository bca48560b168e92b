"""Element patterns and gain normalization.

Angles follow the array convention: ``phi`` is azimuth, ``theta`` is
elevation above the horizontal plane, ``|theta| <= pi/2``. Dipoles are
vertical, so their pattern depends on ``theta`` only.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import coupling
from .errors import ConfigurationError, DomainError, NumericError

__all__ = ["ElementKind", "ElementModel", "pattern", "normalize_gamma", "make_element"]

DEFAULT_RESOLUTION = (512, 256)


class ElementKind(str, enum.Enum):
    ISOTROPIC = "isotropic"
    DIPOLE_HALFWAVE = "dipole"
    COSINE = "cosine"


@dataclass(frozen=True)
class ElementModel:
    """Element type with its gain scale ``gamma``.

    ``impedance_ratio`` is ``Z_s* / (Z_s + Z_s*)`` for dipoles and 1 otherwise.
    ``dipole_length`` is in wavelengths and only meaningful for dipoles.
    """

    kind: ElementKind
    gamma: float = 1.0
    impedance_ratio: complex = 1.0
    dipole_length: float = coupling.DEFAULT_LENGTH

    def __post_init__(self):
        if not (np.isfinite(self.gamma) and self.gamma > 0):
            raise ConfigurationError(f"gamma must be positive and finite, got {self.gamma}")
        if self.kind is ElementKind.ISOTROPIC and self.gamma != 1.0:
            raise ConfigurationError("isotropic elements have gamma = 1")


def _raw_pattern(kind, phi, theta, dipole_length=0.5):
    phi, theta = np.broadcast_arrays(np.asarray(phi, float), np.asarray(theta, float))
    if np.any(np.abs(theta) > np.pi / 2):
        raise DomainError("elevation must satisfy |theta| <= pi/2")
    if kind is ElementKind.ISOTROPIC:
        return np.ones(phi.shape)
    if kind is ElementKind.COSINE:
        # Wrap so that "front half-space" means |phi| <= 90 deg modulo 360.
        phi_w = np.angle(np.exp(1j * phi))
        return np.where(np.abs(phi_w) <= np.pi / 2, np.cos(phi_w) * np.cos(theta), 0.0)
    if kind is ElementKind.DIPOLE_HALFWAVE:
        half_kl = np.pi * dipole_length
        c = np.cos(theta)
        out = np.zeros(phi.shape)
        ok = c > 1e-12  # limit at the dipole axis is 0
        out[ok] = (np.cos(half_kl * np.sin(theta[ok])) - np.cos(half_kl)) / c[ok]
        return out
    raise ConfigurationError(f"unknown element kind {kind!r}")


def pattern(model: ElementModel, phi, theta):
    """Gamma-scaled element pattern amplitude (real valued)."""
    return model.gamma * _raw_pattern(model.kind, phi, theta, model.dipole_length)


def _gain_integral(kind, n_phi, n_theta, dipole_length, scale):
    # Midpoint rule over phi in [-pi, pi], theta in [-pi/2, pi/2].
    phi = -np.pi + (np.arange(n_phi) + 0.5) * (2 * np.pi / n_phi)
    theta = -np.pi / 2 + (np.arange(n_theta) + 0.5) * (np.pi / n_theta)
    P, T = np.meshgrid(phi, theta, indexing="ij")
    g = np.abs(scale * _raw_pattern(kind, P, T, dipole_length)) ** 2
    return float(np.sum(g * np.cos(T)) * (2 * np.pi / n_phi) * (np.pi / n_theta))


def normalize_gamma(
    kind: ElementKind,
    resolution=DEFAULT_RESOLUTION,
    impedance_ratio: complex = 1.0,
    dipole_length: float = coupling.DEFAULT_LENGTH,
) -> float:
    """Scale factor that makes the integrated received gain equal to ``4 pi``.

    The received gain pattern is ``|gamma * impedance_ratio * g|^2`` for
    dipoles and ``|gamma * g|^2`` otherwise. The quadrature is repeated at
    doubled resolution and must agree to 1e-6 relative.
    """
    kind = ElementKind(kind)
    if kind is ElementKind.ISOTROPIC:
        return 1.0
    n_phi, n_theta = resolution
    if n_phi < 64 or n_theta < 64:
        raise ConfigurationError("quadrature resolution must be >= 64 points per axis")
    scale = impedance_ratio if kind is ElementKind.DIPOLE_HALFWAVE else 1.0
    coarse = _gain_integral(kind, n_phi, n_theta, dipole_length, scale)
    fine = _gain_integral(kind, 2 * n_phi, 2 * n_theta, dipole_length, scale)
    if abs(fine - coarse) > 1e-6 * abs(fine):
        raise NumericError(f"gain quadrature not converged: {coarse!r} vs {fine!r}")
    return float(np.sqrt(4 * np.pi / fine))


def make_element(
    kind,
    dipole_length: float = coupling.DEFAULT_LENGTH,
    dipole_radius: float = coupling.DEFAULT_RADIUS,
    resolution=DEFAULT_RESOLUTION,
) -> ElementModel:
    """Build a normalized :class:`ElementModel` of the given kind."""
    kind = ElementKind(kind)
    if kind is ElementKind.DIPOLE_HALFWAVE:
        ratio = coupling.impedance_ratio(coupling.self_impedance(dipole_length, dipole_radius))
        gamma = normalize_gamma(kind, resolution, ratio, dipole_length)
        return ElementModel(kind, gamma, complex(ratio), dipole_length)
    return ElementModel(kind, normalize_gamma(kind, resolution))
