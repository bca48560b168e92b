"""Base-station array layouts.

All generated layouts are linear arrays along the y-axis in the horizontal
plane, centered at the origin. With the direction vector
``u = [cos(phi) cos(theta), sin(phi) cos(theta), sin(theta)]`` this puts
broadside at ``phi = 0``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate, optimize, special

from .errors import ConfigurationError, NumericError

__all__ = [
    "LayoutKind",
    "ArrayLayout",
    "make_ula",
    "make_nula_tchebyshev",
    "load_layout",
    "read_layout_file",
    "write_layout_file",
]

# Collinearity tolerance on the ratio of the 2nd to the 1st singular value.
_COLLINEAR_RTOL = 1e-9


class LayoutKind(str, enum.Enum):
    ULA = "ula"
    NULA_TCHEBYSHEV = "nula"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class ArrayLayout:
    """Immutable set of element positions.

    Attributes:
        positions: ``(N, 3)`` element coordinates in meters.
        wavelength: Carrier wavelength in meters.
        kind: How the layout was produced.
        d_avg: Average inter-element spacing in meters, i.e. the aperture
            divided by ``N - 1``. ``None`` for non-collinear explicit layouts.
    """

    positions: np.ndarray
    wavelength: float
    kind: LayoutKind
    d_avg: float | None = field(default=None)

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ConfigurationError(f"positions must have shape (N, 3), got {pos.shape}")
        if pos.shape[0] < 2:
            raise ConfigurationError("an array needs at least 2 elements")
        if not np.all(np.isfinite(pos)):
            raise ConfigurationError("positions must be finite")
        if not (np.isfinite(self.wavelength) and self.wavelength > 0):
            raise ConfigurationError(f"wavelength must be positive, got {self.wavelength}")
        if len(np.unique(pos, axis=0)) != len(pos):
            raise ConfigurationError("duplicate element positions")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def n_elements(self) -> int:
        return self.positions.shape[0]

    @property
    def positions_wl(self) -> np.ndarray:
        """Positions in wavelengths."""
        return self.positions / self.wavelength

    def min_spacing(self) -> float:
        """Smallest pairwise element distance in meters."""
        diff = self.positions[:, None, :] - self.positions[None, :, :]
        dist = np.linalg.norm(diff, axis=-1)
        return float(dist[np.triu_indices(self.n_elements, 1)].min())


def make_ula(n_elements: int, spacing: float, wavelength: float = 1.0) -> ArrayLayout:
    """Uniform linear array on the y-axis, centered at the origin."""
    if n_elements < 2:
        raise ConfigurationError(f"n_elements must be >= 2, got {n_elements}")
    if not spacing > 0:
        raise ConfigurationError(f"spacing must be positive, got {spacing}")
    y = (np.arange(n_elements) - (n_elements - 1) / 2) * spacing
    pos = np.zeros((n_elements, 3))
    pos[:, 1] = y
    return ArrayLayout(pos, wavelength, LayoutKind.ULA, float(spacing))


def _chebyshev_density(x: np.ndarray, pib: float) -> np.ndarray:
    # Smooth part of the continuous Dolph-Chebyshev aperture distribution on
    # [-1, 1]; the edge impulses are excluded.
    s = np.sqrt(np.clip(1.0 - np.square(x), 0.0, None))
    out = np.empty_like(s)
    small = s < 1e-8
    out[~small] = special.i1(pib * s[~small]) / s[~small]
    out[small] = pib / 2
    return out


def make_nula_tchebyshev(
    n_elements: int,
    d_avg: float,
    wavelength: float = 1.0,
    sidelobe_level_db: float = -20.0,
) -> ArrayLayout:
    """Non-uniform linear array by density tapering.

    Elements are placed at the ``(n - 1/2) / N`` quantiles of the continuous
    Dolph-Chebyshev amplitude taper, which puts them closer together near
    the array center. The result is rescaled so the aperture is exactly
    ``(N - 1) * d_avg``.

    Args:
        n_elements: Number of elements ``N >= 2``.
        d_avg: Average spacing in meters.
        wavelength: Wavelength in meters.
        sidelobe_level_db: Design sidelobe level of the taper, must be < 0.

    Raises:
        ConfigurationError: On invalid arguments.
        NumericError: If the CDF inversion fails.
    """
    if n_elements < 2:
        raise ConfigurationError(f"n_elements must be >= 2, got {n_elements}")
    if not d_avg > 0:
        raise ConfigurationError(f"d_avg must be positive, got {d_avg}")
    if not sidelobe_level_db < 0:
        raise ConfigurationError(f"sidelobe level must be < 0 dB, got {sidelobe_level_db}")

    # Main-lobe to sidelobe voltage ratio R = cosh(pi * B).
    pib = float(np.arccosh(10 ** (-sidelobe_level_db / 20)))
    density = lambda t: float(_chebyshev_density(np.array([t]), pib)[0])  # noqa: E731
    half_mass, _ = integrate.quad(density, 0.0, 1.0, epsabs=0, epsrel=1e-13)

    def upper_half_coordinate(q):
        # Solve CDF(x) = q for q in [1/2, 1) using the mass of [0, x].
        target = (q - 0.5) * 2 * half_mass
        if target == 0:
            return 0.0
        f = lambda x: integrate.quad(density, 0.0, x, epsabs=0, epsrel=1e-13)[0] - target  # noqa: E731
        try:
            return optimize.brentq(f, 0.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        except (ValueError, RuntimeError) as exc:
            raise NumericError(f"density-taper inversion failed at quantile {q}") from exc

    n = n_elements
    upper = np.arange(n // 2, n)
    x_upper = np.array([upper_half_coordinate((m + 0.5) / n) for m in upper])
    if n % 2:
        x = np.concatenate([-x_upper[:0:-1], x_upper])
    else:
        x = np.concatenate([-x_upper[::-1], x_upper])
    if np.any(np.diff(x) <= 0):
        raise NumericError("density-taper inversion produced non-increasing positions")

    aperture = (n - 1) * d_avg
    y = x * (aperture / (2 * x[-1]))
    pos = np.zeros((n, 3))
    pos[:, 1] = y
    return ArrayLayout(pos, wavelength, LayoutKind.NULA_TCHEBYSHEV, float(d_avg))


def load_layout(positions, wavelength: float = 1.0) -> ArrayLayout:
    """Wrap explicit element positions (meters) in an :class:`ArrayLayout`.

    ``d_avg`` is derived from the projection onto the best-fit axis when the
    elements are collinear and left as ``None`` otherwise.
    """
    pos = np.atleast_2d(np.asarray(positions, dtype=float))
    if pos.ndim != 2 or pos.shape[1] != 3:
        raise ConfigurationError(f"positions must have shape (N, 3), got {pos.shape}")
    if len(pos) < 2:
        raise ConfigurationError("an array needs at least 2 elements")
    if len(np.unique(pos, axis=0)) != len(pos):
        raise ConfigurationError("duplicate element positions")

    centered = pos - pos.mean(axis=0)
    _, sv, vt = np.linalg.svd(centered, full_matrices=False)
    d_avg = None
    if sv[1] <= _COLLINEAR_RTOL * sv[0]:
        proj = centered @ vt[0]
        d_avg = float((proj.max() - proj.min()) / (len(pos) - 1))
    return ArrayLayout(pos, wavelength, LayoutKind.EXPLICIT, d_avg)


def read_layout_file(path, wavelength: float = 1.0) -> ArrayLayout:
    """Read a layout file with one ``x y z`` line per element, in wavelengths.

    Lines starting with ``#`` and blank lines are skipped.
    """
    path = Path(path)
    rows = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ConfigurationError(f"{path}:{lineno}: expected 3 coordinates, got {len(parts)}")
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise ConfigurationError(f"{path}:{lineno}: {exc}") from None
    return load_layout(np.array(rows) * wavelength, wavelength)


def format_layout(layout: ArrayLayout) -> str:
    lines = [f"# {layout.n_elements} elements, kind={layout.kind.value}, units=wavelengths"]
    for x, y, z in layout.positions_wl:
        lines.append(" ".join(repr(float(c)) for c in (x, y, z)))
    return "\n".join(lines) + "\n"


def write_layout_file(layout: ArrayLayout, path) -> None:
    Path(path).write_text(format_layout(layout))
