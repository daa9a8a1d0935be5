"""Lattice gauge transforms, Peierls phases, Wilson loops and emulated fields.

Conventions: g = 1, Pauli matrices are used directly (not sigma/2), and the
Pauli projection of a 2x2 matrix M is Tr(M sigma_mu)/2 so that
M = sum_mu c_mu sigma_mu exactly. Block (a, b) of an operator couples
polymer a to polymer b; a hop a -> b is carried by block (b, a).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import BasisMismatch, ExtractionError, InvalidParameter, InvalidTransform
from .geometry import PolymerLattice, periodic_directions
from .hamiltonian import HADAMARD, PAULI, HermitianOperator, _wrap_shift, pauli_components

__all__ = [
    "GaugeTransform",
    "random_u1",
    "random_su2",
    "apply_gauge_transform",
    "bond_vector",
    "peierls_phase_field",
    "apply_peierls",
    "landau_gauge_potential",
    "pure_gauge_shift",
    "extract_bond_log",
    "pauli_matrix",
    "bond_logs",
    "vector_potential",
    "field_strength_bz",
    "GaugeField",
    "gauge_field",
    "plaquettes",
    "wilson_loops",
    "nontrivial_field_test",
]


@dataclass(frozen=True, eq=False)
class GaugeTransform:
    """One unitary matrix per polymer, shape (P, k, k)."""

    matrices: np.ndarray

    def __post_init__(self):
        U = np.asarray(self.matrices, dtype=complex)
        if U.ndim != 3 or U.shape[1] != U.shape[2]:
            raise InvalidTransform("need a stack of square matrices")
        eye = np.eye(U.shape[1])
        err = np.abs(np.einsum("pji,pjk->pik", U.conj(), U) - eye).max(initial=0.0)
        if err > 1e-12:
            raise InvalidTransform(f"matrices are not unitary (error {err:.2e})")
        U = U.copy()
        U.setflags(write=False)
        object.__setattr__(self, "matrices", U)

    @property
    def k(self) -> int:
        return self.matrices.shape[1]

    def full(self) -> np.ndarray:
        return scipy.linalg.block_diag(*self.matrices)

    @classmethod
    def identity(cls, n_polymers, k):
        return cls(np.broadcast_to(np.eye(k), (n_polymers, k, k)))

    @classmethod
    def from_phases(cls, phi, k=1):
        """U = exp(i phi) times the identity on each polymer."""
        phi = np.asarray(phi, dtype=float)
        return cls(np.exp(1j * phi)[:, None, None] * np.eye(k))


def random_u1(n_polymers: int, k: int = 1, rng=None, per_site: bool = False) -> GaugeTransform:
    rng = np.random.default_rng(rng)
    if per_site:
        ph = rng.uniform(0, 2 * np.pi, (n_polymers, k))
        return GaugeTransform(np.exp(1j * ph)[:, :, None] * np.eye(k))
    return GaugeTransform.from_phases(rng.uniform(0, 2 * np.pi, n_polymers), k)


def random_su2(n_polymers: int, rng=None) -> GaugeTransform:
    """Haar-random SU(2) matrices from normalized quaternions."""
    rng = np.random.default_rng(rng)
    q = rng.normal(size=(n_polymers, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    a, b, c, d = q.T
    U = np.empty((n_polymers, 2, 2), dtype=complex)
    U[:, 0, 0] = a + 1j * d
    U[:, 0, 1] = c + 1j * b
    U[:, 1, 0] = -c + 1j * b
    U[:, 1, 1] = a - 1j * d
    return GaugeTransform(U)


def apply_gauge_transform(H: HermitianOperator, G: GaugeTransform) -> HermitianOperator:
    """Block (a, b) -> U_a^dag Delta_ab U_b, i.e. H -> G^dag H G.

    For one-dimensional (phase) blocks this multiplies each bond by
    U^dag(N) U(N + e_i); on-site blocks are conjugated.
    """
    if G.k != H.k or len(G.matrices) != H.n_polymers:
        raise InvalidTransform(f"transform of shape {G.matrices.shape} does not fit operator with k={H.k}, "
                               f"{H.n_polymers} polymers")
    U = G.full()
    M = U.conj().T @ H.matrix @ U
    return H.with_matrix(0.5 * (M + M.conj().T))


def bond_vector(lattice: PolymerLattice, a: int, b: int, direction: int) -> np.ndarray:
    return lattice.centers[b] + _wrap_shift(lattice, a, b, direction) - lattice.centers[a]


def peierls_phase_field(lattice: PolymerLattice, A, periodic=False, g: float = 1.0) -> dict:
    """Phase exp(-i g a_i . A(N)) for each bond N -> N + e_i, keyed (a, b, direction)."""
    A = np.asarray(A, dtype=float)
    if A.shape != (lattice.n_polymers, 2):
        raise InvalidParameter("A needs one 2D vector per polymer")
    out = {}
    for a, b, i in lattice.neighbor_pairs(periodic):
        out[(a, b, i)] = np.exp(-1j * g * bond_vector(lattice, a, b, i) @ A[a])
    return out


def apply_peierls(H: HermitianOperator, A, g: float = 1.0) -> HermitianOperator:
    """Multiply bond blocks (a, b) by their Peierls phase (and (b, a) by its conjugate)."""
    lat = H.lattice
    if lat is None:
        raise InvalidParameter("operator carries no lattice")
    k = H.k
    M = np.array(H.matrix, dtype=complex)
    for (a, b, _), ph in peierls_phase_field(lat, A, H.boundary, g).items():
        M[a * k:(a + 1) * k, b * k:(b + 1) * k] *= ph
        M[b * k:(b + 1) * k, a * k:(a + 1) * k] *= np.conj(ph)
    return H.with_matrix(M)


def landau_gauge_potential(lattice: PolymerLattice, omega: float) -> np.ndarray:
    """A = (0, omega x / L^2): every square plaquette encloses flux omega."""
    x = lattice.centers[:, 0]
    return np.stack([np.zeros_like(x), omega * x / lattice.L**2], axis=1)


def pure_gauge_shift(lattice: PolymerLattice, A, Phi, periodic=False) -> np.ndarray:
    """A - grad Phi (forward differences along each bond).

    Peierls phases of the shifted potential equal those obtained by applying
    the site-local transform U = exp(i Phi) to the unshifted operator.
    """
    A2 = np.array(A, dtype=float)
    Phi = np.asarray(Phi, dtype=float)
    for a, b, i in lattice.neighbor_pairs(periodic):
        v = bond_vector(lattice, a, b, i)
        A2[a] -= (Phi[b] - Phi[a]) * v / (v @ v)
    return A2


def pauli_matrix(c) -> np.ndarray:
    """sum_mu c_mu sigma_mu for components of shape (..., 4)."""
    return np.einsum("...m,mij->...ij", np.asarray(c, dtype=complex), PAULI)


def extract_bond_log(block, bond=None) -> np.ndarray:
    """Pauli components of the principal logarithm of a 2x2 bond block.

    Phi^0 = Tr(log Delta)/2 and Phi^i = Tr(log Delta sigma_i)/2, so that
    exp(Phi^0 + Phi . sigma) = Delta.
    """
    B = np.asarray(block, dtype=complex)
    if B.shape != (2, 2):
        raise ExtractionError("bond block must be 2x2", bond)
    scale = max(np.abs(B).max(), 1e-300)
    w, V = np.linalg.eig(B)
    if np.any(np.abs(w) <= 1e-14 * scale):
        raise ExtractionError("singular bond block", bond)
    if np.any((w.real < 0) & (np.abs(w.imag) <= 1e-12 * scale)):
        raise ExtractionError("eigenvalue on the negative real axis, principal log undefined", bond)
    if np.linalg.cond(V) < 1e8:
        logB = V @ np.diag(np.log(w)) @ np.linalg.inv(V)
    else:
        # defective or nearly defective block
        logB = scipy.linalg.logm(B)
    return pauli_components(logB)


def _grid_shape(lattice):
    if lattice.dimensionality != 2:
        raise BasisMismatch("need a 2D lattice")
    return lattice.shape[1], lattice.shape[0]  # (ny, nx)


def _blocks_in_basis(H: HermitianOperator, basis: str):
    if H.k != 2:
        raise BasisMismatch("bond logarithms need 2x2 blocks")
    if basis == "site":
        return lambda B: B
    if basis == "sa":
        return lambda B: HADAMARD @ B @ HADAMARD
    raise InvalidParameter(f"unknown basis {basis!r}")


def bond_logs(H: HermitianOperator, basis: str = "sa") -> dict:
    """Phi_i(N) = log of the block for bond N -> N + e_i, as (ny, nx, 4) arrays.

    ``basis`` "sa" rotates each block by the dimer Hadamard transform (the
    basis where the internal sigma_1 coupling is diagonal); "site" keeps the
    raw site blocks. Missing bonds are NaN.
    """
    lat = H.lattice
    ny, nx = _grid_shape(lat)
    tf = _blocks_in_basis(H, basis)
    Phi = {0: np.full((ny, nx, 4), np.nan, dtype=complex), 1: np.full((ny, nx, 4), np.nan, dtype=complex)}
    for a, b, i in lat.neighbor_pairs(H.boundary):
        gx, gy = lat.grid[a]
        Phi[i][gy, gx] = extract_bond_log(tf(H.block(a, b)), bond=(a, b))
    return Phi


def vector_potential(Phi: dict) -> dict:
    """A_i(N) = Phi_i(N) - Phi_i(N - e_i); sites lacking either bond are NaN."""
    Ax = np.full_like(Phi[0], np.nan)
    Ay = np.full_like(Phi[1], np.nan)
    Ax[:, 1:] = Phi[0][:, 1:] - Phi[0][:, :-1]
    Ay[1:, :] = Phi[1][1:, :] - Phi[1][:-1, :]
    return {0: Ax, 1: Ay}


def field_strength_bz(A: dict) -> dict:
    """B_z = d_y A_x - d_x A_y - i [A_x, A_y] per plaquette, Pauli components.

    Forward differences anchored at the plaquette's base site (gx, gy);
    the commutator is evaluated at that base site. Returns "curl",
    "commutator" and "total", each (ny-1, nx-1, 4); NaN where undefined.
    """
    Ax, Ay = A[0], A[1]
    curl = (Ax[1:, :-1] - Ax[:-1, :-1]) - (Ay[:-1, 1:] - Ay[:-1, :-1])
    X = pauli_matrix(Ax[:-1, :-1])
    Y = pauli_matrix(Ay[:-1, :-1])
    comm = pauli_components(-1j * (X @ Y - Y @ X))
    return {"curl": curl, "commutator": comm, "total": curl + comm}


@dataclass(frozen=True, eq=False)
class GaugeField:
    basis: str
    Phi: dict
    A: dict
    Bz: dict

    def max_abs(self, which: str, component: int, part: str = "abs") -> float:
        """max over defined samples of |part(component)| for A_x/A_y or B_z terms."""
        if which in ("Ax", "Ay"):
            arrs = [self.A[0 if which == "Ax" else 1][..., component]]
        elif which == "A":
            arrs = [self.A[0][..., component], self.A[1][..., component]]
        else:
            arrs = [self.Bz[which][..., component]]
        f = {"re": np.real, "im": np.imag, "abs": np.abs}[part]
        vals = np.concatenate([np.abs(f(a[~np.isnan(a)])) for a in arrs])
        return float(vals.max()) if vals.size else 0.0


def gauge_field(H: HermitianOperator, basis: str = "sa") -> GaugeField:
    Phi = bond_logs(H, basis)
    A = vector_potential(Phi)
    return GaugeField(basis, Phi, A, field_strength_bz(A))


def plaquettes(lattice: PolymerLattice, periodic=False):
    """Polymer index loops (N, N+x, N+x+y, N+y) in grid orientation."""
    ny, nx = _grid_shape(lattice)
    px, py = periodic_directions(periodic, 2)
    at = lambda x, y: lattice.polymer_at(x % nx, y % ny)
    return [(at(gx, gy), at(gx + 1, gy), at(gx + 1, gy + 1), at(gx, gy + 1))
            for gy in range(ny if py else ny - 1) for gx in range(nx if px else nx - 1)]


def _unitary_part(B):
    if B.shape == (1, 1):
        z = B[0, 0]
        if z == 0:
            raise ExtractionError("zero coupling on a plaquette bond")
        return np.array([[z / abs(z)]])
    U, _ = scipy.linalg.polar(B)
    return U


def wilson_loops(H: HermitianOperator, periodic=None) -> np.ndarray:
    """Ordered products of bond transporters around every plaquette.

    The transporter for a hop a -> b is the unitary polar factor of block
    (b, a). Returns an array (n_plaquettes, k, k).
    """
    lat = H.lattice
    periodic = H.boundary if periodic is None else periodic
    loops = []
    for n0, n1, n2, n3 in plaquettes(lat, periodic):
        W = np.eye(H.k, dtype=complex)
        for a, b in ((n0, n1), (n1, n2), (n2, n3), (n3, n0)):
            W = _unitary_part(np.asarray(H.block(b, a), dtype=complex)) @ W
        loops.append(W)
    return np.array(loops)


def nontrivial_field_test(H: HermitianOperator, tol: float = 1e-9):
    """Whether a plaquette carries gauge-invariant flux.

    U(1) (k = 1): plaquette phase angle != 0 mod 2 pi. k >= 2: Wilson loop
    trace differs from +-k (the loop is not +-identity).
    Returns (flag, diagnostic dict).
    """
    W = wilson_loops(H)
    if H.k == 1:
        flux = np.angle(W[:, 0, 0])
        worst = float(np.abs(flux).max(initial=0.0))
        return worst > tol, {"flux": flux, "max_abs_flux": worst}
    tr = np.trace(W, axis1=1, axis2=2)
    dev = np.minimum(np.abs(tr - H.k), np.abs(tr + H.k))
    worst = float(dev.max(initial=0.0))
    return worst > tol, {"traces": tr, "max_trace_deviation": worst}
