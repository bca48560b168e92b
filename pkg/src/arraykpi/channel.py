"""Line-of-sight far-field channels and reference-array normalization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coupling import CouplingModel
from .elements import ElementKind, ElementModel, pattern
from .errors import ConfigurationError, DegenerateChannelError, DomainError
from .geometry import ArrayLayout

__all__ = [
    "AoaSet",
    "ChannelSet",
    "direction",
    "steering_vector",
    "manifold",
    "draw_aoas",
    "normalize",
    "build_channels",
]


@dataclass(frozen=True)
class AoaSet:
    """Azimuth and elevation angles of arrival in radians, one per UE."""

    phi: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        phi = np.atleast_1d(np.asarray(self.phi, dtype=float))
        theta = np.atleast_1d(np.asarray(self.theta, dtype=float))
        if phi.shape != theta.shape or phi.ndim != 1 or len(phi) < 1:
            raise ConfigurationError("phi and theta must be equal-length 1-D sequences")
        if np.any(np.abs(theta) > np.pi / 2):
            raise DomainError("elevation must satisfy |theta| <= pi/2")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "theta", theta)

    @property
    def k(self) -> int:
        return len(self.phi)


@dataclass(frozen=True)
class ChannelSet:
    """Channels of one realization.

    Attributes:
        H_tilde: ``(N, K)`` channels of the array under test, not normalized.
        H: ``(N, K)`` channels after reference normalization.
        H_ref_tilde: ``(N_ref, K)`` reference-array channels for the same AOAs.
        n_ref: Number of reference elements.
    """

    H_tilde: np.ndarray
    H: np.ndarray
    H_ref_tilde: np.ndarray
    n_ref: int

    @property
    def H_ref(self) -> np.ndarray:
        """Normalized reference channels; every column has norm ``sqrt(n_ref)``."""
        return normalize(self.H_ref_tilde, self.H_ref_tilde, self.n_ref)


def direction(phi, theta):
    """Unit vectors ``[cos phi cos theta, sin phi cos theta, sin theta]``, shape ``(..., 3)``."""
    phi, theta = np.broadcast_arrays(np.asarray(phi, float), np.asarray(theta, float))
    ct = np.cos(theta)
    return np.stack([np.cos(phi) * ct, np.sin(phi) * ct, np.sin(theta)], axis=-1)


def steering_vector(layout: ArrayLayout, phi, theta):
    """Isotropic steering vectors ``exp(-j 2pi/lambda r_n . u)``.

    Scalar angles give an ``(N,)`` vector; 1-D angle arrays of length ``K``
    give an ``(N, K)`` matrix.
    """
    theta_arr = np.asarray(theta, float)
    if np.any(np.abs(theta_arr) > np.pi / 2):
        raise DomainError("elevation must satisfy |theta| <= pi/2")
    u = direction(phi, theta_arr)
    path = layout.positions @ np.moveaxis(u, -1, 0)
    return np.exp(-2j * np.pi / layout.wavelength * path)


def manifold(
    layout: ArrayLayout,
    element: ElementModel,
    coupling: CouplingModel | None,
    phi,
    theta,
):
    """Array response including element patterns and, for dipoles, coupling.

    Isotropic elements return the steering vector. Cosine elements multiply
    it by the common element pattern. Dipoles apply the direction-independent
    coupling matrix to the steering vector scaled by the isolated pattern.
    """
    is_dipole = element.kind is ElementKind.DIPOLE_HALFWAVE
    if is_dipole != (coupling is not None):
        raise ConfigurationError("a coupling model is required for dipoles and only for dipoles")
    a = steering_vector(layout, phi, theta)
    if element.kind is ElementKind.ISOTROPIC:
        return a
    g = pattern(element, phi, theta)
    if element.kind is ElementKind.COSINE:
        return g * a
    if coupling.C.shape[0] != layout.n_elements:
        raise ConfigurationError("coupling matrix does not match the layout size")
    return coupling.C @ (g * a)


def draw_aoas(rng: np.random.Generator, k: int, sector_halfwidth: float) -> AoaSet:
    """I.i.d. uniform azimuths in ``(-sector_halfwidth, sector_halfwidth)`` at zero elevation."""
    if k < 1:
        raise ConfigurationError(f"K must be >= 1, got {k}")
    phi = rng.uniform(-sector_halfwidth, sector_halfwidth, size=k)
    return AoaSet(phi, np.zeros(k))


def normalize(H_tilde, H_ref_tilde, n_ref: int):
    """Scale each column ``k`` by ``sqrt(n_ref) / ||h_ref_k||``."""
    H_tilde = np.asarray(H_tilde)
    ref_norm = np.linalg.norm(np.asarray(H_ref_tilde), axis=0)
    if np.any(ref_norm == 0):
        bad = np.flatnonzero(ref_norm == 0).tolist()
        raise DegenerateChannelError(f"reference channel has zero norm for UE(s) {bad}")
    return H_tilde * (np.sqrt(n_ref) / ref_norm)


def build_channels(
    layout: ArrayLayout,
    element: ElementModel,
    coupling: CouplingModel | None,
    ref_layout: ArrayLayout,
    aoas: AoaSet,
) -> ChannelSet:
    """Test-array and reference-array channels for one set of AOAs."""
    H_tilde = np.atleast_2d(manifold(layout, element, coupling, aoas.phi, aoas.theta))
    H_ref_tilde = np.atleast_2d(steering_vector(ref_layout, aoas.phi, aoas.theta))
    n_ref = ref_layout.n_elements
    return ChannelSet(H_tilde, normalize(H_tilde, H_ref_tilde, n_ref), H_ref_tilde, n_ref)
