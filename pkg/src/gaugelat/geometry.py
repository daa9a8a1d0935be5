"""Site coordinates for polymer lattices.

Three families are built here: rotating dimer chains, the square
"hedgehog" dimer array, and chains of trimer-of-trimer cells. A lattice is
a set of polymers (clusters of identical sites); the number of sites per
polymer is the internal dimension seen by the gauge group.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidChain, InvalidParameter, UnsupportedGeometry

__all__ = [
    "Polymer",
    "PolymerLattice",
    "build_dimer_chain",
    "build_hedgehog_lattice",
    "build_trimer_chain",
    "build_square_lattice",
    "chain_angles",
]


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Polymer:
    center: np.ndarray
    site_offsets: np.ndarray
    theta: float

    @property
    def sites(self) -> np.ndarray:
        return self.center + self.site_offsets


@dataclass(frozen=True, eq=False)
class PolymerLattice:
    """Immutable polymer lattice.

    Polymers are stored as arrays: ``centers`` (P, 2), ``offsets`` (P, k, 2)
    and ``thetas`` (P,). ``grid`` holds the integer lattice label of each
    polymer (0-based), one column per lattice dimension.
    """

    family: str
    centers: np.ndarray
    offsets: np.ndarray
    thetas: np.ndarray
    grid: np.ndarray
    shape: tuple
    L: float
    d: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("centers", "offsets", "thetas"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        g = np.array(self.grid, dtype=int)
        g.setflags(write=False)
        object.__setattr__(self, "grid", g)
        if not np.all(np.isfinite(self.offsets)) or not np.all(np.isfinite(self.centers)):
            raise InvalidParameter("non-finite coordinates")

    @property
    def dimensionality(self) -> int:
        return len(self.shape)

    @property
    def n_polymers(self) -> int:
        return len(self.centers)

    @property
    def sites_per_polymer(self) -> int:
        return self.offsets.shape[1]

    @property
    def dimension(self) -> int:
        return self.n_polymers * self.sites_per_polymer

    @property
    def polymers(self) -> tuple[Polymer, ...]:
        return tuple(Polymer(c, o, float(t)) for c, o, t in zip(self.centers, self.offsets, self.thetas))

    def positions(self) -> np.ndarray:
        """All site coordinates, shape (P*k, 2), in global index order."""
        return (self.centers[:, None, :] + self.offsets).reshape(-1, 2)

    def index(self, polymer: int, site: int) -> int:
        k = self.sites_per_polymer
        if not (0 <= polymer < self.n_polymers and 0 <= site < k):
            raise IndexError((polymer, site))
        return polymer * k + site

    def polymer_at(self, *label) -> int:
        """Polymer index from its 0-based grid label."""
        if len(label) != self.dimensionality:
            raise IndexError(label)
        if self.dimensionality == 1:
            return int(label[0])
        nx, ny = label
        return int(ny) * self.shape[0] + int(nx)

    def neighbor_pairs(self, periodic=False) -> list[tuple[int, int, int]]:
        """Adjacent polymer pairs as (a, b, direction) with b = a + e_direction.

        ``periodic`` is a bool or one bool per lattice direction.
        """
        per = periodic_directions(periodic, self.dimensionality)
        pairs = []
        if self.dimensionality == 1:
            n = self.shape[0]
            pairs = [(i, i + 1, 0) for i in range(n - 1)]
            if per[0] and n > 2:
                pairs.append((n - 1, 0, 0))
            return pairs
        nx_, ny_ = self.shape
        for ny in range(ny_):
            for nx in range(nx_):
                a = self.polymer_at(nx, ny)
                if nx + 1 < nx_ or (per[0] and nx_ > 2):
                    pairs.append((a, self.polymer_at((nx + 1) % nx_, ny), 0))
                if ny + 1 < ny_ or (per[1] and ny_ > 2):
                    pairs.append((a, self.polymer_at(nx, (ny + 1) % ny_), 1))
        return pairs


BOUNDARIES = ("open", "periodic", "periodic-x", "periodic-y")


def periodic_directions(periodic, dim: int) -> tuple:
    """Normalize a boundary spec (bool, tuple or boundary name) to per-direction flags."""
    if isinstance(periodic, str):
        if periodic not in BOUNDARIES:
            raise InvalidParameter(f"unknown boundary {periodic!r}")
        if periodic in ("open", "periodic"):
            return (periodic == "periodic",) * dim
        if dim != 2:
            raise InvalidParameter(f"{periodic} needs a 2D lattice")
        return (periodic == "periodic-x", periodic == "periodic-y")
    if isinstance(periodic, (bool, np.bool_)):
        return (bool(periodic),) * dim
    per = tuple(bool(x) for x in periodic)
    if len(per) != dim:
        raise InvalidParameter("one periodicity flag per direction")
    return per


def _check_lengths(**kw):
    for k, v in kw.items():
        if not np.isfinite(v) or v < 0:
            raise InvalidParameter(f"{k} must be a finite nonnegative length, got {v}")


def chain_angles(N: int, p: int) -> np.ndarray:
    """theta_n = 2 pi p (n-1)/(N-1) for n = 1..N."""
    return 2 * np.pi * p * np.arange(N) / (N - 1)


def build_dimer_chain(N: int, p: int, L: float, d: float) -> PolymerLattice:
    """Chain of N dimers whose orientation makes p full turns along the chain.

    Dimer n sits at ((n-1)L, 0). Its sites are at center -/+ d(sin t, cos t),
    so t = 0 points the dimer across the chain.
    """
    if int(N) != N or N < 2:
        raise InvalidChain(f"need at least two dimers, got N={N}")
    if int(p) != p or not 0 <= p <= N - 1:
        raise InvalidParameter(f"p must be an integer in [0, N-1], got {p}")
    _check_lengths(d=d)
    if L <= 0:
        raise InvalidParameter(f"L must be positive, got {L}")
    N = int(N)
    th = chain_angles(N, p)
    centers = np.stack([np.arange(N) * L, np.zeros(N)], axis=1)
    u = np.stack([np.sin(th), np.cos(th)], axis=1)
    offsets = np.stack([-d * u, d * u], axis=1)
    return PolymerLattice("dimer-chain", centers, offsets, th, np.arange(N)[:, None], (N,), float(L), float(d),
                          dict(N=N, p=int(p), L=float(L), d=float(d)))


def build_hedgehog_lattice(n: int, L: float, d: float) -> PolymerLattice:
    """n x n square array of dimers with the hedgehog orientation pattern.

    Dimer (nx, ny), 1-based, is centered at ((nx-1)L, -(ny-1)L) and tilted by
    phi = pi/4 + pi (ny - nx) / (2(n-2)); site 1 is at center - d(sin phi, cos phi)
    and site 2 at center + d(sin phi, cos phi).
    """
    if int(n) != n or n < 4 or n % 2:
        raise UnsupportedGeometry(f"hedgehog side must be even and >= 4, got n={n}")
    if L <= 0:
        raise InvalidParameter(f"L must be positive, got {L}")
    _check_lengths(d=d)
    n = int(n)
    nx, ny = np.meshgrid(np.arange(1, n + 1), np.arange(1, n + 1))
    nx, ny = nx.ravel(), ny.ravel()  # polymer index = (ny-1)*n + (nx-1)
    phi = np.pi / 4 + np.pi * (ny - nx) / (2 * (n - 2))
    centers = np.stack([(nx - 1) * L, -(ny - 1) * L], axis=1).astype(float)
    u = np.stack([np.sin(phi), np.cos(phi)], axis=1)
    offsets = np.stack([-d * u, d * u], axis=1)
    grid = np.stack([nx - 1, ny - 1], axis=1)
    return PolymerLattice("hedgehog", centers, offsets, phi, grid, (n, n), float(L), float(d),
                          dict(n=n, L=float(L), d=float(d)))


def trimer_cell_offsets(Theta: float, r_trimer: float, d: float,
                        internal_angles: Sequence[float] = (0.0, 0.0, 0.0),
                        deformations: Sequence[float] = (0.0, 0.0, 0.0)) -> np.ndarray:
    """Nine site offsets of one trimer-of-trimers cell rotated by Theta.

    Internal trimer k (A, B, C) is centered at radius r_trimer, angle
    Theta + 2 pi k/3 + pi/2. Its site j lies at radius d from that center, at
    angle (center angle) + theta_k + 2 pi j/3. A nonzero deformation eps_k
    moves site 1 of trimer k to radius d(1 + eps_k), breaking its internal C3.
    """
    out = np.empty((9, 2))
    for k in range(3):
        a = Theta + 2 * np.pi * k / 3 + np.pi / 2
        tc = r_trimer * np.array([np.cos(a), np.sin(a)])
        for j in range(3):
            b = a + internal_angles[k] + 2 * np.pi * j / 3
            rad = d * (1 + deformations[k]) if j == 0 else d
            out[3 * k + j] = tc + rad * np.array([np.cos(b), np.sin(b)])
    return out


def build_trimer_chain(N_cells: int, p: int, R_cell: float = 5.0, r_trimer: float = 1.7, d: float = 0.15,
                       internal_angles: Sequence[float] = (0.0, 0.0, 0.0),
                       deformations: Sequence[float] = (0.0, 0.0, 0.0)) -> PolymerLattice:
    """Chain of nine-site cells rotating p full turns along the chain.

    Cell n (0-based) sits at (n R_cell, 0) rotated by 2 pi p n/(N_cells-1).
    Default lengths keep every intra-trimer coupling more than three times
    the strongest inter-cell coupling (ratio about 4.1 at lambda = 1).
    """
    if int(N_cells) != N_cells or N_cells < 2:
        raise InvalidChain(f"need at least two cells, got {N_cells}")
    for k, v in dict(R_cell=R_cell, r_trimer=r_trimer, d=d).items():
        if not np.isfinite(v) or v <= 0:
            raise InvalidParameter(f"{k} must be positive, got {v}")
    if len(internal_angles) != 3 or len(deformations) != 3:
        raise InvalidParameter("need three internal angles and three deformations")
    if any(1 + e <= 0 for e in deformations):
        raise InvalidParameter("deformations must exceed -1")
    N_cells = int(N_cells)
    th = chain_angles(N_cells, p)
    centers = np.stack([np.arange(N_cells) * R_cell, np.zeros(N_cells)], axis=1)
    offsets = np.array([trimer_cell_offsets(t, r_trimer, d, internal_angles, deformations) for t in th])
    return PolymerLattice("trimer-chain", centers, offsets, th, np.arange(N_cells)[:, None], (N_cells,),
                          float(R_cell), float(d),
                          dict(N_cells=N_cells, p=int(p), R_cell=float(R_cell), r_trimer=float(r_trimer),
                               d=float(d), internal_angles=[float(x) for x in internal_angles],
                               deformations=[float(x) for x in deformations]))


def build_square_lattice(nx: int, ny: int, L: float = 1.0) -> PolymerLattice:
    """Plain nx x ny square lattice of single sites, y axis pointing up."""
    if nx < 2 or ny < 2:
        raise UnsupportedGeometry("need at least 2 x 2 sites")
    if L <= 0:
        raise InvalidParameter(f"L must be positive, got {L}")
    gx, gy = np.meshgrid(np.arange(nx), np.arange(ny))
    gx, gy = gx.ravel(), gy.ravel()
    centers = np.stack([gx * L, gy * L], axis=1).astype(float)
    return PolymerLattice("square", centers, np.zeros((nx * ny, 1, 2)), np.zeros(nx * ny),
                          np.stack([gx, gy], axis=1), (int(nx), int(ny)), float(L), 0.0,
                          dict(nx=int(nx), ny=int(ny), L=float(L)))
