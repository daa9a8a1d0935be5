"""One check per acceptance criterion at the stated tolerances.

Each test records a PASS/FAIL line (shown in the terminal summary) and then
asserts, so a red criterion also fails the test run.
"""
import time

import numpy as np
import pytest

from gaugelat.coupling import CouplingModel
from gaugelat.errors import FitFailure
from gaugelat.fractal import box_counting_dimension, cantor_points
from gaugelat.gauge import apply_gauge_transform, apply_peierls, gauge_field, landau_gauge_potential, random_su2, random_u1
from gaugelat.geometry import PolymerLattice, build_dimer_chain, build_hedgehog_lattice, build_square_lattice, trimer_cell_offsets
from gaugelat.hamiltonian import HermitianOperator, assemble, dimer_basis_transform, reorganize_sa
from gaugelat.harper import (AmoParameters, amo_matrix, effective_lambda_estimate, isospectral_distance,
                             small_lambda_couplings, variable_coupling_chain, variable_coupling_magnitudes)
from gaugelat.spectral import (RESIDUAL_RTOL, eigendecompose, energy_clusters, flux_sweep, lattice_constant_sweep,
                               localization_report, rank_group_ranges, residuals)

# frozen from the first verified run
FROZEN_DISTANCES = {
    (3, 3): 8.881784197001252e-16, (3, 6): 0.7320508075688776,
    (5, 5): 8.881784197001252e-16, (5, 10): 0.3819660112501051,
    (8, 8): 0.29637843860809965, (8, 16): 0.2963784386080995,
    (13, 13): 2.6645352591003757e-15, (13, 26): 0.12167468455697095,
}
TOP_STATE_IPR = 0.00997358869578344
TOP_STATE_GAP = 5.403802960657345e-10
FLAT_BAND_RATIO = 0.10
FIG3_L = [2.9, 3.2, 3.5, 3.8, 4.1, 4.4, 4.7, 5.0, 5.5, 6.0]

FIG1A = dict(N=201, L=1.66, d=0.1)
FIG1A_MODEL = CouplingModel(1.0, 1.66)


def record(acceptance, k, ok, detail):
    acceptance[k] = (bool(ok), detail)
    print(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


def largest_gap_fraction(w):
    w = np.sort(w)
    return float(np.diff(w).max() / (w[-1] - w[0]))


def test_c01_butterfly(acceptance):
    t = time.perf_counter()
    sweep = flux_sweep("dimer-chain", FIG1A, range(201), "symmetric", FIG1A_MODEL)
    elapsed = time.perf_counter() - t
    mirror = max(np.abs(sweep.at(p) - sweep.at(200 - p)).max() for p in range(201))
    # |S-S coupling| ~ |cos(2 omega n - omega)| maps to a Harper chain of flux 4p/(N-1): half flux at p = 25
    near = {p: largest_gap_fraction(sweep.at(p)) for p in (24, 25, 26)}
    ok_a = mirror < 1e-10
    ok_b = near[24] > 0.05 and near[26] > 0.05
    ok_c = elapsed < 60
    record(acceptance, 1, ok_a and ok_b and ok_c,
           f"mirror {mirror:.1e} (<1e-10); largest gap/bandwidth p=24 {near[24]:.3f}, p=26 {near[26]:.3f} (>0.05), "
           f"exact half flux p=25 {near[25]:.4f}; sweep {elapsed:.1f} s (<60)")
    assert ok_a and ok_b and ok_c


def test_c02_fractal(acceptance):
    sweep = flux_sweep("dimer-chain", FIG1A, [0, 2], "symmetric", FIG1A_MODEL)
    d0 = box_counting_dimension(sweep.at(0)).D
    d2 = box_counting_dimension(sweep.at(2)).D
    dc = box_counting_dimension(cantor_points(8)).D
    ok = abs(d0 - 0.96) <= 0.10, abs(d2 - 0.50) <= 0.10, abs(dc - 0.6309) <= 0.03
    record(acceptance, 2, all(ok), f"D(p=0) {d0:.3f} (0.96+-0.10); D(p=2) {d2:.3f} (0.50+-0.10); "
                                   f"Cantor {dc:.4f} (0.6309+-0.03)")
    assert all(ok)


def test_c03_effective_lambda(acceptance):
    N, model = 201, CouplingModel(1.0, 1.0)
    worst, n_fit, skipped = 0.0, 0, []
    for p in range(1, N - 1):
        om = 2 * np.pi * p / (N - 1)
        if abs(np.cos(om)) <= 0.3:
            continue
        dec = reorganize_sa(dimer_basis_transform(assemble(build_dimer_chain(N, p, 2.8, 0.35), model)))
        try:
            lam, _, _ = effective_lambda_estimate(np.diag(dec.H_A.matrix, 1), 2 * om)
        except FitFailure:
            skipped.append(p)  # 2 omega = 0 mod pi: modulation and baseline coincide
            continue
        worst = max(worst, abs(lam / (0.08 * abs(np.cos(om))) - 1))
        n_fit += 1
    ok = worst < 0.2
    record(acceptance, 3, ok, f"max relative error {worst:.4f} (<0.2) over {n_fit} flux values; "
                              f"unidentifiable p {skipped}")
    assert ok


def test_c04_appendix_map(acceptance):
    worst = 0.0
    report = []
    for (q, N), frozen in FROZEN_DISTANCES.items():
        om = 2 * np.pi / q
        d = isospectral_distance(variable_coupling_chain(N, 1.0, om), amo_matrix(AmoParameters(1.0, om, N)))
        worst = max(worst, abs(d - frozen))
        report.append(f"{q}/{N}:{d:.3g}")
    phase = np.linspace(0, 2 * np.pi, 721)
    taylor = max(np.abs(variable_coupling_magnitudes(phase, lam, 1.0) - small_lambda_couplings(phase, lam, 1.0)).max()
                 / (2 * lam**2) for lam in (0.001, 0.01, 0.05, 0.1))
    ok = worst < 1e-9 and taylor < 1
    record(acceptance, 4, ok, f"distances {' '.join(report)}; max drift from frozen {worst:.1e} (<1e-9); "
                              f"small-Lambda error / 2 Lambda^2 max {taylor:.3f} (<1)")
    assert ok


def test_c05_gauge_invariance(acceptance):
    H = assemble(build_hedgehog_lattice(6, 2.9, 1.3))
    w0 = np.linalg.eigvalsh(H.matrix)
    rng = np.random.default_rng(2024)
    dev = 0.0
    for G in [random_u1(36, 2, rng, per_site=True) for _ in range(50)] + [random_su2(36, rng) for _ in range(50)]:
        dev = max(dev, np.abs(np.linalg.eigvalsh(apply_gauge_transform(H, G).matrix) - w0).max())
    rel = dev / H.frobenius()
    ok = rel < 1e-12
    record(acceptance, 5, ok, f"max deviation / ||H||_F {rel:.1e} (<1e-12) over 50 U(1) + 50 SU(2)")
    assert ok


def test_c06_peierls_harper(acceptance):
    unit = CouplingModel(delta0=np.e, lam=1.0)
    worst = 0.0
    for p, q in ((1, 3), (2, 5), (3, 8), (5, 13)):
        nx, ny = 2 * q + 1, q
        om = 2 * np.pi * p / q
        H = assemble(build_square_lattice(nx, ny, 1.0), unit, "periodic-y")
        w2d = np.linalg.eigvalsh(apply_peierls(H, landau_gauge_potential(H.lattice, om)).matrix)
        parts = [np.linalg.eigvalsh(amo_matrix(AmoParameters(1.0, om, nx, nu=-2 * np.pi * j / ny - om,
                                                             boundary="open")).matrix) for j in range(ny)]
        worst = max(worst, np.abs(w2d - np.sort(np.concatenate(parts))).max())
    ok = worst < 1e-9
    record(acceptance, 6, ok, f"max |E_2D - E_Harper(ky)| {worst:.1e} (<1e-9) at p/q = 1/3, 2/5, 3/8, 5/13")
    assert ok


def test_c07_confinement(acceptance):
    lat = build_hedgehog_lattice(20, 2.9, 1.3)
    rep = localization_report(assemble(lat, CouplingModel(1.0, 1.0)), lat)
    center = lat.centers.mean(axis=0)
    off = rep.centroid_offset(center)
    _, reps = lattice_constant_sweep(20, 1.3, FIG3_L)
    flags = [r.localized for r in reps]
    ok_flag = rep.localized
    ok_centroid = off <= lat.L
    ok_sweep = flags[0] and not flags[-1]
    ok_regress = np.isclose(rep.ipr, TOP_STATE_IPR, rtol=1e-8) and abs(rep.gap - TOP_STATE_GAP) < 1e-11
    ok = ok_flag and ok_centroid and ok_sweep and ok_regress
    record(acceptance, 7, ok, f"top state localized={rep.localized} (IPR {rep.ipr:.5f}, threshold {10 / rep.dimension:.5f}; "
                              f"gap {rep.gap:.2e}); centroid offset {off:.3f} (<= L={lat.L}); "
                              f"flags over L sweep {''.join('1' if f else '0' for f in flags)}; "
                              f"regression constants {'match' if ok_regress else 'DRIFT'}")
    assert ok


def test_c08_field_portraits(acceptance):
    gf = gauge_field(assemble(build_hedgehog_lattice(20, 2.9, 1.3)), basis="sa")
    zeros = {"Re A0": gf.max_abs("A", 0, "re"), "Re A2": gf.max_abs("A", 2, "re"),
             "Im A1": gf.max_abs("A", 1, "im"), "Im A3": gf.max_abs("A", 3, "im")}
    comm = [gf.max_abs("commutator", c) for c in range(4)]
    ok_zero = all(v < 1e-10 for v in zeros.values())
    ok_dom = int(np.argmax(comm)) == 1
    record(acceptance, 8, ok_zero and ok_dom,
           "; ".join(f"max|{k}| {v:.2e}" for k, v in zeros.items()) + " (<1e-10); commutator max per component "
           + " ".join(f"{c:.3g}" for c in comm) + " (sigma1 largest)")
    assert ok_zero and ok_dom


def test_c09_trimers(acceptance):
    N = 101
    ps = range(0, N, 4)
    sym = flux_sweep("trimer-chain", dict(N_cells=N), ps)
    br = flux_sweep("trimer-chain", dict(N_cells=N, internal_angles=(np.pi / 3, 0.0, 0.0),
                                         deformations=(-0.8, 0.0, 0.0)), ps)
    lo, mid, top = rank_group_ranges(sym, [6 * N, 2 * N, N])
    overlap = min(mid[1], top[1]) - max(mid[0], top[0])
    separated = mid[0] - lo[1]
    low = energy_clusters(np.concatenate([w for _, w in br.records]))[0]
    ratio = (low[1] - low[0]) / (lo[1] - lo[0])
    off = trimer_cell_offsets(0.0, 0.0, 0.4)[:3]
    cell = PolymerLattice("custom", np.zeros((1, 2)), off[None], np.zeros(1), np.zeros((1, 1), int), (1,), 1.0, 0.4)
    D = np.exp(-0.4 * np.sqrt(3))
    iso = np.abs(np.linalg.eigvalsh(assemble(cell).matrix) - [-D, -D, 2 * D]).max()
    ok = overlap > 0 and separated > 0 and ratio < FLAT_BAND_RATIO and iso < 1e-12
    record(acceptance, 9, ok, f"upper groups overlap {overlap:.3f} (>0), lower gap {separated:.3f} (>0); "
                              f"lowest group width ratio {ratio:.4f} (<{FLAT_BAND_RATIO}); isolated trimer error {iso:.1e}")
    assert ok


def test_c10_solver_contract(acceptance):
    rng = np.random.default_rng(7)
    worst = 0.0
    for n in np.linspace(2, 400, 100).astype(int):
        A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        H = HermitianOperator(0.5 * (A + A.conj().T))
        w, V = eigendecompose(H)
        worst = max(worst, residuals(H.matrix, w, V).max() / H.frobenius())
    ok = worst <= RESIDUAL_RTOL
    record(acceptance, 10, ok, f"max residual / ||H||_F {worst:.1e} (<=1e-10) over 100 matrices, n <= 400")
    assert ok
