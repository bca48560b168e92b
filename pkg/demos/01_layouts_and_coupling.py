# Array layouts and dipole mutual coupling
#
# Builds the half-wavelength ULA and the density-tapered NULA at both average
# spacings, prints their spacing statistics, and shows how strongly the
# dipole coupling matrix departs from a scaled identity.
#
# Run: python demos/01_layouts_and_coupling.py

import numpy as np

from arraykpi import build_mcm, make_nula_tchebyshev, make_ula, mutual_impedance, self_impedance

# %% Layouts
# Positions are in wavelengths along the y axis. The NULA packs elements
# near the center and spreads them out toward the edges.

for name, layout in [
    ("ULA   d=0.5", make_ula(32, 0.5)),
    ("NULA  d=0.5", make_nula_tchebyshev(32, 0.5)),
    ("NULA  d=2.0", make_nula_tchebyshev(32, 2.0)),
]:
    gaps = np.diff(layout.positions_wl[:, 1])
    print(f"{name}: aperture {np.ptp(layout.positions_wl[:, 1]):6.2f}  "
          f"min gap {gaps.min():.3f}  max gap {gaps.max():.3f}")

# %% Impedances
# Induced-EMF values for half-wave dipoles. Mutual impedance falls off with
# distance, roughly as 1/d once past a wavelength.

print("\nZ_s =", np.round(self_impedance(), 3))
for d in (0.5, 1.0, 2.0, 4.0):
    print(f"Z_m({d}) = {np.round(mutual_impedance(d), 3)}")

# %% Coupling matrix
# Relative off-diagonal energy of C. With conjugate-matched loads an
# uncoupled array gives C = r I, so this ratio measures the coupling.

for name, layout in [("ULA 0.5", make_ula(32, 0.5)), ("ULA 2.0", make_ula(32, 2.0)),
                     ("NULA 2.0", make_nula_tchebyshev(32, 2.0))]:
    _, cm = build_mcm(layout)
    off = cm.C - np.diag(np.diag(cm.C))
    print(f"{name}: ||offdiag(C)|| / ||diag(C)|| = {np.linalg.norm(off) / np.linalg.norm(np.diag(cm.C)):.4f}")
