"""Trimer-of-trimers chains: overlapping upper bands, flattened lower band.

With C3-symmetric cells the nine levels per cell form three groups; the
upper two overlap across the turn sweep. Deforming and rotating a single
internal trimer breaks both C3 symmetries and pulls one level per cell out
of the lower group as an almost flat band.
"""
import numpy as np

from gaugelat.spectral import energy_clusters, flux_sweep, rank_group_ranges

N = 101
ps = range(0, N, 4)
sym = flux_sweep("trimer-chain", dict(N_cells=N), ps)
lo, mid, top = rank_group_ranges(sym, [6 * N, 2 * N, N])
print("symmetric groups:", [tuple(round(x, 4) for x in g) for g in (lo, mid, top)])

broken = flux_sweep("trimer-chain", dict(N_cells=N, internal_angles=(np.pi / 3, 0, 0),
                                         deformations=(-0.8, 0, 0)), ps)
groups = energy_clusters(np.concatenate([w for _, w in broken.records]))
print("broken clusters:", [tuple(round(x, 4) for x in g) for g in groups])
print(f"lowest width / symmetric lower width = {(groups[0][1] - groups[0][0]) / (lo[1] - lo[0]):.3f}")
