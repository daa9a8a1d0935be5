"""Reading an SU(2) field off the hedgehog couplings.

Every 2x2 bond block is written as exp(Phi0 + Phi.sigma) in the dimer
(symmetric/antisymmetric) basis. Differences of Phi along each direction
give A, and B_z = dy Ax - dx Ay - i[Ax, Ay]. Gauge-invariant Wilson loops
confirm that the field cannot be transformed away.
"""
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from gaugelat import assemble, build_hedgehog_lattice
from gaugelat.gauge import apply_gauge_transform, gauge_field, nontrivial_field_test, random_su2

out = sys.argv[1] if len(sys.argv) > 1 else "."
H = assemble(build_hedgehog_lattice(20, 2.9, 1.3))
gf = gauge_field(H, basis="sa")
for c in range(4):
    print(f"A component {c}: max|Re| {gf.max_abs('A', c, 're'):.3g}  max|Im| {gf.max_abs('A', c, 'im'):.3g}")
print("commutator max per Pauli component:", [f"{gf.max_abs('commutator', c):.3g}" for c in range(4)])

flag, diag = nontrivial_field_test(H)
print("non-trivial field:", flag, f"(worst Wilson trace deviation {diag['max_trace_deviation']:.3f})")
G = random_su2(H.n_polymers, 1)
print("same after a random SU(2) transform:", nontrivial_field_test(apply_gauge_transform(H, G))[0])

fig, axes = plt.subplots(1, 2, figsize=(10, 4.5))
axes[0].imshow(gf.Bz["commutator"][..., 1].real, origin="lower", cmap="RdBu")
axes[0].set_title("B_z commutator, sigma_1")
axes[1].imshow(gf.A[0][..., 1].real, origin="lower", cmap="RdBu")
axes[1].set_title("Re A_x, sigma_1")
fig.tight_layout()
fig.savefig(f"{out}/portraits.png", dpi=150)
