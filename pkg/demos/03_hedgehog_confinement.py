"""Hedgehog dimer array: where does the top state live?

The dimers point toward the array center. We look at the top eigenstate
(participation, centroid, gap to its neighbor) while the lattice constant
grows. At this size the top state comes as a nearly degenerate pair spread
over the central region, so it does not pass the localization thresholds.
"""
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from gaugelat import CouplingModel, assemble, build_hedgehog_lattice, localization_report
from gaugelat.spectral import lattice_constant_sweep

out = sys.argv[1] if len(sys.argv) > 1 else "."
n, d = 20, 1.3
lat = build_hedgehog_lattice(n, 2.9, d)
rep = localization_report(assemble(lat, CouplingModel()), lat)
print(f"IPR {rep.ipr:.5f} (1/dim = {1 / rep.dimension:.5f}), gap {rep.gap:.2e}, "
      f"centroid offset {rep.centroid_offset(lat.centers.mean(0)):.2f}")

Ls = np.linspace(2.9, 6.0, 8)
sweep, reps = lattice_constant_sweep(n, d, Ls)
for L, r in zip(Ls, reps):
    print(f"L={L:.2f}  IPR {r.ipr:.5f}  gap {r.gap:.2e}  localized {r.localized}")

fig, (a1, a2) = plt.subplots(1, 2, figsize=(10, 4.5))
for L, w in sweep.records:
    a1.plot(np.full(w.size, L), w, ",", color="k")
a1.set_xlabel("L")
a1.set_ylabel("energy")
X = lat.positions()
a2.scatter(X[:, 0], X[:, 1], c=rep.probability, s=8, cmap="magma")
a2.set_aspect("equal")
a2.set_title("top state |psi|^2")
fig.tight_layout()
fig.savefig(f"{out}/hedgehog.png", dpi=150)
