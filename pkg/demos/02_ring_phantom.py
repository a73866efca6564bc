"""Build the desk-scale ring phantom and look at its conditioning.

Generators sit on an inner circle and sensors on an outer circle; the
forward operator uses radial point dipoles. Three sources with distinct
footprints and time courses are projected to the sensors and calibrated
white noise is added at a chosen peak signal-to-noise ratio.
"""

import numpy as np

from rvmix import NoiseSpec, SNR_PRESETS_DB, add_noise, make_phantom

ph = make_phantom(S=200, N=31, T=64)
print("=== ring phantom ===")
print(f"sources S={ph.S}, sensors N={ph.N}, samples T={ph.T}")
print(f"active generators: {np.sum(np.any(ph.support_true, axis=1))}")
print(f"truth sparseness: {100 * np.mean(ph.J_true == 0):.2f}% of cells are zero")
print(f"lead field condition number: {np.linalg.cond(ph.K):.1f}")

V_clean = ph.V_clean
print(f"\nclean observations: peak |V| = {np.abs(V_clean).max():.2f}")
for snr in SNR_PRESETS_DB:
    V, sigma = add_noise(V_clean, NoiseSpec(peak_snr_db=snr, seed=0))
    emp = np.std(V - V_clean)
    print(f"  peak SNR {snr:4.0f} dB -> noise sd {sigma:8.4f} (empirical {emp:8.4f})")

print("""
The same phantom is always produced for a given configuration, and the
noise draw is pinned by its seed, so downstream comparisons across
methods and seeds are exactly repeatable.
""")
