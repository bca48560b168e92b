# Comparing arrays through KPI distributions
#
# Runs the seven-array sweep with and without user dropping and plots the
# CDFs of the element gain, beam correlation, normalized SINR and UE rate.
# Trials default to 2000 for a quick look; pass a number to change it.
#
# Run: python demos/03_array_comparison.py [trials] [outfile]

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from arraykpi import ScenarioConfig, ergodic_rates, run_sweep

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 2000
outfile = sys.argv[2] if len(sys.argv) > 2 else "array_comparison.png"
results = run_sweep(ScenarioConfig(mc_trials=trials))

# %% Summary table
print(f"{'array':16s} {'dropping':9s} {'P(drop)':>8s} {'sum rate':>9s}")
for (name, dropping), ds in results.items():
    print(f"{name:16s} {str(dropping):9s} {ds.drop_probability:8.4f} {ergodic_rates(ds)[1]:9.3f}")

# %% CDF panels
# Curves of dropping runs stop at the served fraction.

panels = [("ieg", "IEG [dB]", True), ("bcc", "|w_kk|^2 [dB]", True),
          ("sinr_over_p", "SINR / P_UL [dB]", True), ("rate", "UE rate [bit/s/Hz]", False)]
fig, axes = plt.subplots(2, 4, figsize=(16, 7), sharey=True)
for row, dropping in enumerate((False, True)):
    for ax, (metric, label, in_db) in zip(axes[row], panels):
        for name in dict.fromkeys(n for n, _ in results):
            ds = results[name, dropping]
            x, F = ds.cdf(metric).steps()
            if in_db:
                x = 10 * np.log10(np.maximum(x, 1e-6))
            ax.step(np.r_[x[0], x], np.r_[0.0, F], where="post", label=name)
        ax.set_xlabel(label)
        ax.grid(alpha=0.3)
    axes[row, 0].set_ylabel("CDF, " + ("with dropping" if dropping else "no dropping"))
axes[0, 3].legend(fontsize=7)
fig.tight_layout()
fig.savefig(outfile, dpi=120)
print("saved", outfile)
