"""The Harper potential can be traded for modulated hoppings.

A chain with hoppings sqrt(1 + Lambda^2 + 2 Lambda cos(omega n + chi)) and
no potential is isospectral to the Harper chain on an infinite lattice. On a
finite ring this only holds when the ring is commensurate with the map; here
we look at how close the two spectra get and at the small-Lambda expansion.
"""
import numpy as np

from gaugelat.harper import (AmoParameters, amo_matrix, isospectral_distance, rational_bandwidth,
                             small_lambda_couplings, variable_coupling_chain, variable_coupling_magnitudes)

print("q   N   distance")
for q in (3, 5, 8, 13):
    for N in (q, 2 * q):
        om = 2 * np.pi / q
        dist = isospectral_distance(variable_coupling_chain(N, 1.0, om), amo_matrix(AmoParameters(1.0, om, N)))
        print(f"{q:2d} {N:3d}   {dist:.3e}")

phase = np.linspace(0, 2 * np.pi, 361)
for lam in (0.01, 0.05, 0.1):
    err = np.abs(variable_coupling_magnitudes(phase, lam, 1.0) - small_lambda_couplings(phase, lam, 1.0)).max()
    print(f"Lambda={lam}: first-order hopping error {err:.2e} = {err / lam**2:.3f} Lambda^2")

# total bandwidth at rational flux from the exact Bloch bands
for lam in (0.5, 1.0):
    ms = [rational_bandwidth(lam, p, q) for p, q in ((1, 3), (2, 5), (3, 8), (5, 13), (8, 21))]
    print(f"Lambda={lam}: band measure", " ".join(f"{m:.4f}" for m in ms), f"(|4-4L| = {abs(4 - 4 * lam)})")
