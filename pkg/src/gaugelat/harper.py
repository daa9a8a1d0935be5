"""Almost Mathieu (Harper) operator and its potential-free variable-coupling twin."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FitFailure, InvalidParameter
from .hamiltonian import HermitianOperator

__all__ = [
    "AmoParameters",
    "amo_matrix",
    "tridiagonal_operator",
    "variable_coupling_magnitudes",
    "variable_coupling_chain",
    "small_lambda_couplings",
    "isospectral_distance",
    "effective_lambda_estimate",
    "rational_bands",
    "rational_bandwidth",
]


@dataclass(frozen=True)
class AmoParameters:
    """H = T + T^dag + Lambda (E + E^dag) on sites n = 1..N."""

    Lambda: float
    omega: float
    N: int
    nu: float = 0.0
    boundary: str = "periodic"

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise InvalidParameter(f"need N >= 2, got {self.N}")
        if self.boundary not in ("open", "periodic"):
            raise InvalidParameter(f"unknown boundary {self.boundary!r}")


def tridiagonal_operator(diag, off, boundary="open") -> HermitianOperator:
    """Symmetric tridiagonal matrix; for a periodic ring off[-1] closes the loop."""
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    N = len(diag)
    H = np.diag(diag)
    H[np.arange(N - 1), np.arange(1, N)] = off[:N - 1]
    H[np.arange(1, N), np.arange(N - 1)] = off[:N - 1]
    if boundary == "periodic" and N > 2:
        H[0, N - 1] += off[N - 1]
        H[N - 1, 0] += off[N - 1]
    return HermitianOperator(H, 1, "chain", None, boundary)


def amo_matrix(params: AmoParameters) -> HermitianOperator:
    """Unit hoppings and on-site potential 2 Lambda cos(omega n + nu)."""
    n = np.arange(1, params.N + 1)
    diag = 2 * params.Lambda * np.cos(params.omega * n + params.nu)
    return tridiagonal_operator(diag, np.ones(params.N), params.boundary)


def _bloch_block(Lambda, omega, q, nu, phase):
    n = np.arange(1, q + 1)
    H = np.diag(2 * Lambda * np.cos(omega * n + nu)).astype(complex)
    H[np.arange(q - 1), np.arange(1, q)] = 1.0
    H[np.arange(1, q), np.arange(q - 1)] = 1.0
    if q == 1:
        H[0, 0] += 2 * np.cos(np.angle(phase))
    elif q == 2:
        H[0, 1] += np.conj(phase)
        H[1, 0] += phase
    else:
        H[q - 1, 0] += phase
        H[0, q - 1] += np.conj(phase)
    return np.linalg.eigvalsh(H)


def rational_bands(Lambda: float, p: int, q: int, nu: float = 0.0) -> np.ndarray:
    """Band intervals (q, 2) of the infinite AMO at omega = 2 pi p/q.

    Band edges of a q-periodic tridiagonal operator sit at Bloch phase 0 or
    pi, so the q x q periodic and antiperiodic blocks give them exactly.
    """
    if int(q) != q or q < 1:
        raise InvalidParameter(f"need q >= 1, got {q}")
    om = 2 * np.pi * p / q
    e0 = _bloch_block(Lambda, om, int(q), nu, 1.0)
    e1 = _bloch_block(Lambda, om, int(q), nu, -1.0)
    return np.sort(np.stack([e0, e1], axis=1), axis=1)


def rational_bandwidth(Lambda: float, p: int, q: int, nu: float = 0.0) -> float:
    """Lebesgue measure of the union of the rational-flux bands."""
    b = rational_bands(Lambda, p, q, nu)
    total, hi = 0.0, -np.inf
    for lo, up in b[np.argsort(b[:, 0])]:
        lo = max(lo, hi)
        if up > lo:
            total += up - lo
            hi = up
    return float(total)


def variable_coupling_magnitudes(n, Lambda, omega, chi=0.0, branch=+1):
    """|Delta_n| = sqrt(1 + Lambda^2 + 2 Lambda cos(omega n + chi)).

    The two branches 1 + Lambda exp(+-i(omega n + chi)) have equal modulus,
    so ``branch`` only flips the sign of the cosine argument.
    """
    if branch not in (1, -1):
        raise InvalidParameter("branch must be +1 or -1")
    arg = branch * (omega * np.asarray(n, dtype=float) + chi)
    return np.sqrt(1 + Lambda**2 + 2 * Lambda * np.cos(arg))


def small_lambda_couplings(n, Lambda, omega, chi=0.0):
    """First-order form |Delta_n| ~ 1 + Lambda cos(omega n + chi)."""
    return 1 + Lambda * np.cos(omega * np.asarray(n, dtype=float) + chi)


def variable_coupling_chain(N: int, Lambda: float, omega: float, chi: float = 0.0, branch: int = 1,
                            boundary: str = "periodic") -> HermitianOperator:
    """Zero on-site potential, bond n -> n+1 carries |Delta_n| (n = 1..N)."""
    if int(N) != N or N < 2:
        raise InvalidParameter(f"need N >= 2, got {N}")
    n = np.arange(1, N + 1)
    return tridiagonal_operator(np.zeros(N), variable_coupling_magnitudes(n, Lambda, omega, chi, branch), boundary)


def isospectral_distance(H1, H2) -> float:
    """Hausdorff distance between the two eigenvalue sets."""
    M1 = np.asarray(getattr(H1, "matrix", H1))
    M2 = np.asarray(getattr(H2, "matrix", H2))
    if M1.shape != M2.shape:
        raise InvalidParameter(f"dimension mismatch {M1.shape} vs {M2.shape}")
    a = np.linalg.eigvalsh(M1)
    b = np.linalg.eigvalsh(M2)
    D = np.abs(a[:, None] - b[None, :])
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def effective_lambda_estimate(couplings, omega: float, n=None):
    """Fit |Delta_n| = baseline (1 + Lambda cos(omega n + chi)).

    ``n`` defaults to 1..len(couplings). Returns (Lambda, chi, baseline) with
    Lambda >= 0. Raises FitFailure when cos and sin of omega n are not
    independent of the constant over the sampled bonds.
    """
    y = np.abs(np.asarray(couplings, dtype=float))
    if len(y) < 3:
        raise FitFailure("need at least three bonds")
    n = np.arange(1, len(y) + 1) if n is None else np.asarray(n, dtype=float)
    X = np.stack([np.ones_like(n, dtype=float), np.cos(omega * n), -np.sin(omega * n)], axis=1)
    s = np.linalg.svd(X, compute_uv=False)
    if s[-1] < 1e-8 * s[0]:
        raise FitFailure(f"degenerate design at omega={omega}: modulation indistinguishable from baseline")
    (b, c1, c2), *_ = np.linalg.lstsq(X, y, rcond=None)
    if b == 0:
        raise FitFailure("zero baseline")
    amp = np.hypot(c1, c2)
    return float(amp / abs(b)), float(np.arctan2(c2, c1)), float(b)
