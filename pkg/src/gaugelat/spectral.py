"""Hermitian eigensolver contract, flux sweeps and localization diagnostics."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.linalg

from .coupling import CouplingModel
from .errors import ContractViolation, InvalidFilter, InvalidParameter, RecordNotFound
from .geometry import PolymerLattice, build_dimer_chain, build_hedgehog_lattice, build_trimer_chain
from .hamiltonian import (HermitianOperator, assemble, dimer_basis_transform, reorganize_sa,
                          sector_blocks, trimer_basis_transform)

__all__ = [
    "RESIDUAL_RTOL",
    "eigendecompose",
    "eigenvalues",
    "residuals",
    "SpectrumSweep",
    "flux_sweep",
    "band_operator",
    "LocalizationThresholds",
    "LocalizationReport",
    "localization_report",
    "lattice_constant_sweep",
    "resolve_threads",
    "energy_clusters",
    "rank_group_ranges",
]

RESIDUAL_RTOL = 1e-10


def _as_matrix(H) -> np.ndarray:
    return np.asarray(H.matrix if isinstance(H, HermitianOperator) else H)


def _check_hermitian(M, rtol=1e-12):
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ContractViolation("need a square matrix")
    scale = np.abs(M).max(initial=0.0)
    if np.abs(M - M.conj().T).max(initial=0.0) > rtol * max(scale, 1e-300):
        raise ContractViolation("input is not Hermitian")


def residuals(M, w, V) -> np.ndarray:
    """Per-pair residual norms ||M v - w v||_2."""
    return np.linalg.norm(M @ V - V * w, axis=0)


def _fix_phase(V):
    # largest-magnitude component of each vector made real positive
    idx = np.argmax(np.abs(V), axis=0)
    ph = V[idx, np.arange(V.shape[1])]
    ph = ph / np.abs(ph)
    return V / ph


def eigendecompose(H, check: bool = True):
    """Ascending eigenvalues and orthonormal eigenvectors (as columns).

    The residual contract ||H v - w v|| <= 1e-10 ||H||_F is verified; a
    failing LAPACK driver is retried with a different one before giving up.
    Eigenvector phases are fixed so the largest component is real positive.
    """
    M = _as_matrix(H)
    _check_hermitian(M)
    M = 0.5 * (M + M.conj().T)
    fro = np.linalg.norm(M)
    for driver in ("evr", "evd", "ev"):
        w, V = scipy.linalg.eigh(M, driver=driver, check_finite=True)
        V = _fix_phase(V)
        if not check:
            return w, V
        ok = residuals(M, w, V).max(initial=0.0) <= RESIDUAL_RTOL * max(fro, 1e-300)
        n = V.shape[1]
        ok &= np.abs(V.conj().T @ V - np.eye(n)).max(initial=0.0) <= 1e-10
        if ok:
            return w, V
    raise ContractViolation("eigensolver residual contract violated by every driver")


def eigenvalues(H) -> np.ndarray:
    M = _as_matrix(H)
    _check_hermitian(M)
    n = M.shape[0]
    # tridiagonal real input (chain blocks) takes the fast path
    if n > 2 and np.isrealobj(M) and not np.any(np.triu(M, 2)):
        return scipy.linalg.eigvalsh_tridiagonal(np.diag(M).copy(), np.diag(M, 1).copy())
    return scipy.linalg.eigvalsh(0.5 * (M + M.conj().T))


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        env = os.environ.get("GAUGELAT_THREADS")
        threads = int(env) if env else 1
    if threads < 1:
        raise InvalidParameter(f"threads must be >= 1, got {threads}")
    return int(threads)


@dataclass
class SpectrumSweep:
    """Ordered (parameter value, sorted eigenvalues) records."""

    parameter_name: str
    records: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def values(self) -> list:
        return [v for v, _ in self.records]

    def at(self, value) -> np.ndarray:
        for v, w in self.records:
            if v == value:
                return w
        raise RecordNotFound(f"no record at {self.parameter_name}={value}")

    def rows(self):
        for v, w in self.records:
            for i, e in enumerate(w):
                yield v, i, e

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write("param,eigen_index,energy\n")
            for v, i, e in self.rows():
                fh.write(f"{_fmt(v)},{i},{float(e):.17g}\n")

    @classmethod
    def from_csv(cls, path, parameter_name="p"):
        recs: dict = {}
        with open(path) as fh:
            fh.readline()
            for line in fh:
                v, i, e = line.strip().split(",")
                v = float(v)
                v = int(v) if v.is_integer() else v
                recs.setdefault(v, []).append((int(i), float(e)))
        records = [(v, np.array([e for _, e in sorted(r)])) for v, r in recs.items()]
        return cls(parameter_name, records)


def energy_clusters(values, rel_gap: float = 0.01) -> list[tuple[float, float]]:
    """(low, high) of the runs of a pooled level set split at gaps > rel_gap * span.

    Pooling every record of a sweep gives the band groups as they appear in
    a butterfly plot.
    """
    w = np.sort(np.asarray(values, dtype=float).ravel())
    if w.size == 0:
        return []
    cut = np.where(np.diff(w) > rel_gap * (w[-1] - w[0]))[0]
    lo = np.concatenate([[0], cut + 1])
    hi = np.concatenate([cut, [w.size - 1]])
    return [(float(w[a]), float(w[b])) for a, b in zip(lo, hi)]


def rank_group_ranges(sweep: SpectrumSweep, sizes: Sequence[int]) -> list[tuple[float, float]]:
    """Energy range over the whole sweep of consecutive rank blocks.

    ``sizes`` splits each sorted record from the bottom (e.g. 6N, 2N, N
    levels for a nine-site cell chain); unlike gap clustering this keeps
    groups apart even where their ranges overlap.
    """
    edges = np.concatenate([[0], np.cumsum(sizes)])
    out = []
    for a, b in zip(edges[:-1], edges[1:]):
        block = np.concatenate([np.sort(w)[a:b] for _, w in sweep.records])
        if block.size == 0:
            raise InvalidParameter("rank block outside the records")
        out.append((float(block.min()), float(block.max())))
    return out


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


FILTERS = {
    "dimer-chain": ("all", "symmetric", "antisymmetric"),
    "trimer-chain": ("all", "sector"),
}


def band_operator(H: HermitianOperator, band_filter: str = "all", sector: int = 3):
    """The matrix whose eigenvalues form the requested band.

    For dimers, "symmetric" is the S-S block (second Hadamard component) and
    "antisymmetric" the A-A block, following the labels used for the S/A
    reorganization; the A-S coupling is ignored. For trimer cells, "sector"
    picks one C3 sector block (3 = uniform, 1 and 2 = doublet sectors).
    """
    if band_filter == "all":
        return H.matrix
    if H.k == 2 and band_filter in ("symmetric", "antisymmetric"):
        dec = reorganize_sa(dimer_basis_transform(H))
        return (dec.H_S if band_filter == "symmetric" else dec.H_A).matrix
    if H.k == 9 and band_filter == "sector":
        return sector_blocks(trimer_basis_transform(H, scope="global"))[sector]
    raise InvalidFilter(f"filter {band_filter!r} does not apply to internal dimension {H.k}")


def _builder(family: str) -> Callable[..., PolymerLattice]:
    if family == "dimer-chain":
        return build_dimer_chain
    if family == "trimer-chain":
        return build_trimer_chain
    raise InvalidParameter(f"unknown sweep family {family!r}")


def flux_sweep(family: str, params: dict, ps: Iterable[int] | None = None, band_filter: str = "all",
               model: CouplingModel | None = None, boundary: str = "open", sector: int = 3,
               threads: int | None = None) -> SpectrumSweep:
    """Spectrum for every turn number p (default 0..N-1).

    ``params`` holds the geometry arguments of the family builder except p.
    Records come out in the order of ``ps`` whatever the thread count.
    """
    if family not in FILTERS:
        raise InvalidParameter(f"unknown sweep family {family!r}")
    if band_filter not in FILTERS[family]:
        raise InvalidFilter(f"filter {band_filter!r} is not available for {family}")
    model = model or CouplingModel()
    build = _builder(family)
    N = params["N"] if family == "dimer-chain" else params["N_cells"]
    ps = list(range(N)) if ps is None else [int(p) for p in ps]

    def one(p):
        H = assemble(build(p=p, **params), model, boundary)
        return np.sort(eigenvalues(band_operator(H, band_filter, sector)))

    nt = resolve_threads(threads)
    if nt == 1 or len(ps) < 2:
        spectra = [one(p) for p in ps]
    else:
        with ThreadPoolExecutor(max_workers=nt) as ex:
            spectra = list(ex.map(one, ps))
    meta = dict(family=family, params=dict(params), band_filter=band_filter, boundary=boundary,
                sector=sector if band_filter == "sector" else None,
                model=dict(delta0=model.delta0, lam=model.lam, cutoff=model.cutoff, radius=model.radius))
    return SpectrumSweep("p", list(zip(ps, spectra)), meta)


@dataclass(frozen=True)
class LocalizationThresholds:
    """A state is flagged localized when IPR > ipr_factor/dimension and its
    gap to the nearest level exceeds gap_fraction of the total bandwidth."""

    ipr_factor: float = 10.0
    gap_fraction: float = 0.02


@dataclass(frozen=True)
class LocalizationReport:
    eigen_index: int
    energy: float
    ipr: float
    centroid: np.ndarray
    gap: float
    bandwidth: float
    dimension: int
    localized: bool
    probability: np.ndarray = field(repr=False, default=None)

    def centroid_offset(self, center) -> float:
        return float(np.linalg.norm(self.centroid - np.asarray(center)))


def localization_report(H: HermitianOperator, lattice: PolymerLattice | None = None, which="top",
                        thresholds: LocalizationThresholds = LocalizationThresholds()) -> LocalizationReport:
    lattice = lattice or H.lattice
    if lattice is None:
        raise InvalidParameter("site positions are needed for the centroid")
    w, V = eigendecompose(H)
    n = len(w)
    i = n - 1 if which == "top" else int(which)
    prob = np.abs(V[:, i]) ** 2
    prob = prob / prob.sum()
    ipr = float(np.sum(prob**2))
    centroid = prob @ lattice.positions()
    nb = [abs(w[j] - w[i]) for j in (i - 1, i + 1) if 0 <= j < n]
    gap = float(min(nb)) if nb else np.inf
    bw = float(w[-1] - w[0])
    flag = ipr > thresholds.ipr_factor / n and gap > thresholds.gap_fraction * bw
    return LocalizationReport(i, float(w[i]), ipr, centroid, gap, bw, n, bool(flag), prob)


def lattice_constant_sweep(n: int, d: float, Ls: Sequence[float], model: CouplingModel | None = None,
                           thresholds: LocalizationThresholds = LocalizationThresholds(),
                           threads: int | None = None):
    """Hedgehog spectrum and top-state localization for each lattice constant."""
    model = model or CouplingModel()

    def one(L):
        lat = build_hedgehog_lattice(n, L, d)
        H = assemble(lat, model)
        rep = localization_report(H, lat, "top", thresholds)
        return np.sort(eigenvalues(H)), rep

    nt = resolve_threads(threads)
    if nt == 1:
        out = [one(L) for L in Ls]
    else:
        with ThreadPoolExecutor(max_workers=nt) as ex:
            out = list(ex.map(one, Ls))
    sweep = SpectrumSweep("L", [(float(L), w) for L, (w, _) in zip(Ls, out)],
                          dict(family="hedgehog", n=n, d=d, lam=model.lam, delta0=model.delta0))
    return sweep, [r for _, r in out]
