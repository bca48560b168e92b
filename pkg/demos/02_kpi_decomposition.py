# One realization, three ways to get the SINR
#
# Draws eight UEs for a dipole ULA, then computes the uplink ZF SINR directly
# from the channels, from the element gain and beam correlations, and from the
# element gain and the projection onto the interference subspace.
#
# Run: python demos/02_kpi_decomposition.py

import numpy as np

from arraykpi import build_channels, build_mcm, draw_aoas, make_element, make_ula, zf

rng = np.random.default_rng(2024)
layout = make_ula(32, 0.5)
ref = make_ula(32, 0.5)
element = make_element("dipole")
_, coupling = build_mcm(layout)

aoas = draw_aoas(rng, 8, np.radians(60))
ch = build_channels(layout, element, coupling, ref, aoas)
p_ul = 10.0

# %% Direct form, per-UE power P_UL / N_ref and unit noise
W = zf.zf_combiner(ch.H)
direct = zf.sinr_general(ch.H, W, p_ul / ch.n_ref, 1.0)

# %% Gain times correlation
G = zf.ieg(ch.H, ch.H_ref)
B = np.abs(zf.bcc_matrix(W, ch.H)) ** 2
decomposed = zf.sinr_decomposed(G, B, p_ul)

# %% Gain times distance to the interference subspace
g, resid = zf.projection_split_all(ch.H)
projected = p_ul * G * resid

print(" UE   AoA[deg]  IEG[dB]  BCC     GSCC    SINR[dB]")
for k in range(8):
    print(f"{k:3d} {np.degrees(aoas.phi[k]):9.2f} {10 * np.log10(G[k]):8.3f} "
          f"{B[k, k]:.4f}  {g[k]:.4f}  {10 * np.log10(decomposed[k]):8.3f}")
print("max rel. difference direct vs decomposed:", np.max(np.abs(direct / decomposed - 1)))
print("max rel. difference projected vs decomposed:", np.max(np.abs(projected / decomposed - 1)))
