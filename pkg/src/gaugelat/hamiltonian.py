"""Tight-binding operators for polymer lattices and their internal-basis transforms."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .coupling import CouplingModel, sa_transform
from .errors import BasisMismatch, ContractViolation, InvalidParameter
from .geometry import BOUNDARIES, PolymerLattice, periodic_directions

__all__ = [
    "HermitianOperator",
    "BlockDecomposition",
    "SU2Decomposition",
    "HADAMARD",
    "PAULI",
    "assemble",
    "dimer_basis_transform",
    "reorganize_sa",
    "su2_square_hamiltonian",
    "pauli_components",
    "c3_matrix",
    "C3_SECTOR_ORDER",
    "trimer_basis_transform",
    "trimer_sector_permutation",
    "sector_blocks",
    "bond_block",
    "export_matrix",
    "read_matrix",
]

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)

PAULI = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)

HERMITIAN_RTOL = 1e-14


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Dense Hermitian matrix indexed by (polymer, internal site)."""

    matrix: np.ndarray
    k: int = 1
    basis_label: str = "site"
    lattice: Optional[PolymerLattice] = None
    boundary: str = "open"

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidParameter("operator must be a square matrix")
        if m.shape[0] % self.k:
            raise BasisMismatch(f"dimension {m.shape[0]} is not a multiple of internal dimension {self.k}")
        scale = np.abs(m).max() if m.size else 0.0
        if np.abs(m - m.conj().T).max(initial=0.0) > HERMITIAN_RTOL * max(scale, 1e-300):
            raise ContractViolation("matrix is not Hermitian")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_polymers(self) -> int:
        return self.dimension // self.k

    def block(self, a: int, b: int) -> np.ndarray:
        k = self.k
        return self.matrix[a * k:(a + 1) * k, b * k:(b + 1) * k]

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def with_matrix(self, m, basis_label=None) -> "HermitianOperator":
        return HermitianOperator(m, self.k, basis_label or self.basis_label, self.lattice, self.boundary)


def _period_vector(lattice: PolymerLattice, direction: int) -> np.ndarray:
    e = np.eye(lattice.dimensionality, dtype=int)[direction]
    step = lattice.centers[lattice.polymer_at(*e)] - lattice.centers[0]
    return step * lattice.shape[direction]


def _wrap_shift(lattice: PolymerLattice, a: int, b: int, direction: int) -> np.ndarray:
    """Translation that brings polymer b next to polymer a across a periodic edge."""
    if lattice.grid[b, direction] < lattice.grid[a, direction]:
        return _period_vector(lattice, direction)
    return np.zeros(2)


def bond_block(lattice: PolymerLattice, model: CouplingModel, a: int, b: int, shift=(0.0, 0.0)) -> np.ndarray:
    """Site couplings between polymers a and b (b optionally translated)."""
    sa = lattice.centers[a] + lattice.offsets[a]
    sb = lattice.centers[b] + np.asarray(shift) + lattice.offsets[b]
    r = np.linalg.norm(sa[:, None, :] - sb[None, :, :], axis=-1)
    return model(r)


def assemble(lattice: PolymerLattice, model: CouplingModel = CouplingModel(), boundary: str = "open",
             onsite: float = 0.0) -> HermitianOperator:
    """Tight-binding operator of a polymer lattice.

    On-site energies are ``onsite`` (zero by default). Sites of the same
    polymer always couple; sites of different polymers couple according to
    the model's cutoff policy. A periodic boundary closes the lattice with
    the wrap-around bond evaluated at the translated (ring) distance.
    """
    per = periodic_directions(boundary, lattice.dimensionality)
    k = lattice.sites_per_polymer
    P = lattice.n_polymers
    H = np.zeros((P * k, P * k))
    iu = ~np.eye(k, dtype=bool)
    for a in range(P):
        H[a * k:(a + 1) * k, a * k:(a + 1) * k] = np.where(iu, bond_block(lattice, model, a, a), 0.0)
    if model.cutoff == "adjacent":
        for a, b, direction in lattice.neighbor_pairs(per):
            shift = _wrap_shift(lattice, a, b, direction)
            blk = bond_block(lattice, model, a, b, shift)
            H[a * k:(a + 1) * k, b * k:(b + 1) * k] += blk
            H[b * k:(b + 1) * k, a * k:(a + 1) * k] += blk.T
    else:
        X = lattice.positions()
        owner = np.repeat(np.arange(P), k)
        shifts = [np.zeros(2)]
        if any(per):
            steps = [_period_vector(lattice, i) for i in range(lattice.dimensionality) if per[i]]
            shifts = [sum((c - 1) * st for c, st in zip(combo, steps)) + np.zeros(2)
                      for combo in np.ndindex(*([3] * len(steps)))]
        r = np.full((P * k, P * k), np.inf)
        for s in shifts:
            r = np.minimum(r, np.linalg.norm(X[:, None, :] - (X[None, :, :] + s), axis=-1))
        mask = (owner[:, None] != owner[None, :]) & (r < model.radius)
        H += np.where(mask, model(np.where(mask, r, 0.0)), 0.0)
    H[np.diag_indices_from(H)] = onsite
    return HermitianOperator(H, k, "site", lattice, boundary)


def _check_k(H: HermitianOperator, k: int, label="site"):
    if H.k != k:
        raise BasisMismatch(f"expected internal dimension {k}, got {H.k}")
    if H.basis_label != label:
        raise BasisMismatch(f"expected {label} basis, got {H.basis_label}")


def dimer_basis_transform(H: HermitianOperator) -> HermitianOperator:
    """Hadamard conjugation of every dimer: (1 x U)^T H (1 x U).

    Component 0 of each dimer becomes the in-phase state A, component 1 the
    out-of-phase state S, so an isolated dimer maps to diag(+Delta, -Delta).
    """
    _check_k(H, 2)
    P = H.n_polymers
    B = H.matrix.reshape(P, 2, P, 2)
    b11, b12, b21, b22 = B[:, 0, :, 0], B[:, 0, :, 1], B[:, 1, :, 0], B[:, 1, :, 1]
    M = np.empty_like(B)
    # blockwise U B U, grouped as in sa_transform so symmetric blocks stay exactly diagonal
    M[:, 0, :, 0], M[:, 0, :, 1], M[:, 1, :, 0], M[:, 1, :, 1] = sa_transform(b11, b12, b21, b22)
    M = M.reshape(2 * P, 2 * P)
    return H.with_matrix(0.5 * (M + M.conj().T), "dimer-SA")


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    """A/S reorganization: [[H_A, delta_AS], [delta_AS^H, H_S]] = P^T H1 P."""

    H_A: HermitianOperator
    H_S: HermitianOperator
    delta_AS: np.ndarray
    permutation: np.ndarray

    def reassemble(self) -> np.ndarray:
        """Inverse of the permutation, back in interleaved dimer-SA order."""
        top = np.hstack([self.H_A.matrix, self.delta_AS])
        bottom = np.hstack([self.delta_AS.conj().T, self.H_S.matrix])
        M = np.vstack([top, bottom])
        out = np.empty_like(M)
        p = self.permutation
        out[np.ix_(p, p)] = M
        return out

    def decoupling_ratio(self) -> float:
        """max|delta_AS| / max|H_S| (H_S diagonal included)."""
        den = np.abs(self.H_S.matrix).max()
        return float(np.abs(self.delta_AS).max() / den) if den > 0 else np.inf

    def is_decoupled(self, threshold: float = 0.05) -> bool:
        return self.decoupling_ratio() < threshold


def reorganize_sa(H1: HermitianOperator) -> BlockDecomposition:
    _check_k(H1, 2, "dimer-SA")
    P = H1.n_polymers
    perm = np.concatenate([2 * np.arange(P), 2 * np.arange(P) + 1])
    M = H1.matrix[np.ix_(perm, perm)]
    HA = HermitianOperator(M[:P, :P], 1, "A", H1.lattice, H1.boundary)
    HS = HermitianOperator(M[P:, P:], 1, "S", H1.lattice, H1.boundary)
    dAS = M[:P, P:].copy()
    return BlockDecomposition(HA, HS, dAS, perm)


def pauli_components(M) -> np.ndarray:
    """(c0, c1, c2, c3) with M = sum c_mu sigma_mu, i.e. c_mu = Tr(M sigma_mu)/2."""
    M = np.asarray(M)
    return np.einsum("...ij,mji->...m", M, PAULI) / 2


@dataclass(frozen=True, eq=False)
class SU2Decomposition:
    """Square dimer lattice split into a periodic part plus Pauli fluctuations.

    ``fluctuations[(a, b, direction)]`` holds the Pauli components of the bond
    block minus Delta(L)(1 + sigma_1). ``transformed`` is the sigma_1-diagonal
    (A/S) form with H_A and H_S on the diagonal.
    """

    H: HermitianOperator
    transformed: BlockDecomposition
    fluctuations: dict
    delta_L: float

    def offdiagonal_norm(self) -> float:
        return float(np.linalg.norm(self.transformed.delta_AS))


def su2_square_hamiltonian(lattice: PolymerLattice, model: CouplingModel = CouplingModel(),
                           boundary: str = "open") -> SU2Decomposition:
    if lattice.sites_per_polymer != 2 or lattice.dimensionality != 2:
        raise BasisMismatch("need a 2D dimer lattice")
    H = assemble(lattice, model, boundary)
    dL = model.delta_L(lattice.L)
    base = dL * (PAULI[0] + PAULI[1]).real
    fl = {}
    for a, b, direction in lattice.neighbor_pairs(boundary):
        fl[(a, b, direction)] = pauli_components(H.block(a, b) - base)
    return SU2Decomposition(H, reorganize_sa(dimer_basis_transform(H)), fl, dL)


def c3_matrix() -> np.ndarray:
    """(U)_{pq} = exp(i 2 pi (2+p) q / 3)/sqrt(3), p, q = 1..3."""
    p = np.arange(1, 4)[:, None]
    q = np.arange(1, 4)[None, :]
    return np.exp(2j * np.pi * (2 + p) * q / 3) / np.sqrt(3)


# column q = 3 is the uniform (symmetric) state, then the two doublet sectors
C3_SECTOR_ORDER = (3, 1, 2)


def trimer_sector_permutation(n_cells: int, scope: str = "cell") -> np.ndarray:
    """Permutation from (cell, trimer, sector-column) order to sector order.

    Labels are generated explicitly: each transformed index carries
    (cell, trimer m in A,B,C, sector q). scope="cell" sorts within each cell by
    (rank of q, m); scope="global" gathers every cell's sector-q states into
    one contiguous block, cell-major inside it.
    """
    labels = [(c, m, q) for c in range(n_cells) for m in range(3) for q in (1, 2, 3)]
    rank = {q: i for i, q in enumerate(C3_SECTOR_ORDER)}
    if scope == "cell":
        key = lambda i: (labels[i][0], rank[labels[i][2]], labels[i][1])
    elif scope == "global":
        key = lambda i: (rank[labels[i][2]], labels[i][0], labels[i][1])
    else:
        raise InvalidParameter(f"unknown scope {scope!r}")
    return np.array(sorted(range(len(labels)), key=key))


def trimer_basis_transform(H: HermitianOperator, scope: str = "cell") -> HermitianOperator:
    """C3 Fourier transform of every internal trimer, then the sector permutation."""
    _check_k(H, 9)
    n = H.n_polymers
    U = np.kron(np.eye(3 * n), c3_matrix())
    M = U.conj().T @ H.matrix @ U
    perm = trimer_sector_permutation(n, scope)
    M = M[np.ix_(perm, perm)]
    M = 0.5 * (M + M.conj().T)
    return H.with_matrix(M, "trimer-C3" if scope == "cell" else "trimer-C3-global")


def sector_blocks(Ht: HermitianOperator) -> dict:
    """Diagonal blocks {q: matrix} of a globally sector-ordered trimer operator."""
    if Ht.basis_label != "trimer-C3-global":
        raise BasisMismatch("need trimer_basis_transform(..., scope='global') output")
    m = Ht.dimension // 3
    return {q: Ht.matrix[i * m:(i + 1) * m, i * m:(i + 1) * m] for i, q in enumerate(C3_SECTOR_ORDER)}


def export_matrix(H, path):
    """Write ``row col re im`` lines (0-based indices) for every nonzero entry."""
    M = np.asarray(getattr(H, "matrix", H))
    rows, cols = np.nonzero(M)
    with open(path, "w") as fh:
        fh.write(f"% {M.shape[0]} {M.shape[1]} {len(rows)}\n")
        for r, c in zip(rows, cols):
            v = complex(M[r, c])
            fh.write(f"{r} {c} {v.real:.17g} {v.imag:.17g}\n")


def read_matrix(path) -> np.ndarray:
    with open(path) as fh:
        head = fh.readline().split()
        n, m = int(head[1]), int(head[2])
        M = np.zeros((n, m), dtype=complex)
        for line in fh:
            r, c, re, im = line.split()
            M[int(r), int(c)] = float(re) + 1j * float(im)
    return M
