"""Rotating dimer chain: the symmetric band traces a Hofstadter butterfly.

Each dimer of the chain is turned a little further than its neighbor, so that
the whole chain makes p full turns. After the Hadamard change of basis the
chain splits into two nearly independent bands. The S-S couplings oscillate
with the turn rate, which is exactly what a Harper chain looks like once its
on-site potential has been mapped into the hoppings.

    python3 demos/01_dimer_butterfly.py [out_dir]
"""
import sys
import time

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from gaugelat import CouplingModel, assemble, build_dimer_chain, dimer_basis_transform, flux_sweep, reorganize_sa
from gaugelat.fractal import box_counting_dimension

out = sys.argv[1] if len(sys.argv) > 1 else "."
N, L, d = 201, 1.66, 0.1
model = CouplingModel(1.0, L)  # lambda = L

# how well do the two bands decouple?
dec = reorganize_sa(dimer_basis_transform(assemble(build_dimer_chain(N, 13, L, d), model)))
print(f"A-S leakage at p=13: {dec.decoupling_ratio():.4f} of the largest S-S entry")

t = time.perf_counter()
sweep = flux_sweep("dimer-chain", dict(N=N, L=L, d=d), range(N), "symmetric", model)
print(f"{N} spectra in {time.perf_counter() - t:.1f} s")

# mirror symmetry p <-> N-1-p
print("mirror error", max(np.abs(sweep.at(p) - sweep.at(N - 1 - p)).max() for p in range(N)))

for p in (0, 2, 7):
    print(f"p={p}: box-counting D = {box_counting_dimension(sweep.at(p)).D:.3f}")

fig, ax = plt.subplots(figsize=(6, 5))
for p, w in sweep.records:
    ax.plot(np.full(w.size, p / (N - 1)), w, ",", color="k")
ax.set_xlabel("p / (N - 1)")
ax.set_ylabel("energy (symmetric band)")
fig.tight_layout()
fig.savefig(f"{out}/dimer_butterfly.png", dpi=150)
