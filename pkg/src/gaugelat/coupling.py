"""Distance-to-coupling law and closed forms for rotating dimer chains."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .errors import DecompositionFailure, InvalidParameter

__all__ = [
    "CouplingModel",
    "DimerBondCouplings",
    "coupling_strength",
    "dimer_pair_distances",
    "rotation_terms",
    "expanded_coupling",
    "sa_transform",
    "sa_inverse",
    "bond_couplings",
    "closed_form_SS",
    "closed_form_AA",
    "aa_parameters",
    "polar_parameters",
    "polar_matrix",
    "polar_diagonal",
    "gamma_polar",
]


@dataclass(frozen=True)
class CouplingModel:
    """Exponential coupling law delta0 * exp(-r / lam).

    cutoff is "adjacent" (only neighboring polymers couple) or "radius"
    (any two sites of different polymers closer than ``radius`` couple).
    """

    delta0: float = 1.0
    lam: float = 1.0
    cutoff: str = "adjacent"
    radius: float | None = None

    def __post_init__(self):
        if not self.delta0 > 0 or not self.lam > 0:
            raise InvalidParameter(f"delta0 and lam must be positive, got {self.delta0}, {self.lam}")
        if self.cutoff not in ("adjacent", "radius"):
            raise InvalidParameter(f"unknown cutoff policy {self.cutoff!r}")
        if self.cutoff == "radius" and not (self.radius and self.radius > 0):
            raise InvalidParameter("radius cutoff needs a positive radius")

    def __call__(self, r):
        return self.delta0 * np.exp(-np.asarray(r) / self.lam)

    def delta_L(self, L: float) -> float:
        return float(self.delta0 * np.exp(-L / self.lam))


def coupling_strength(distance, model: CouplingModel = CouplingModel()):
    r = np.asarray(distance, dtype=float)
    if np.any(r < 0):
        raise InvalidParameter("negative distance")
    out = model(r)
    return float(out) if out.ndim == 0 else out


def rotation_terms(theta_n, theta_m):
    """A^{ij} and B^{ij} as 2x2 arrays (i, j = 1, 2 mapped to 0, 1)."""
    s = np.array([-1.0, 1.0])  # (-1)^i
    A = 1 - np.outer(s, s) * np.cos(theta_n - theta_m)
    B = s[:, None] * np.sin(theta_n) - s[None, :] * np.sin(theta_m)
    return A, B


def dimer_pair_distances(theta_n, theta_m, L, d):
    """Site-to-site distances between neighboring dimers, 2x2 array."""
    if L <= 0 or d < 0:
        raise InvalidParameter(f"need L > 0 and d >= 0, got L={L}, d={d}")
    a = d / L
    A, B = rotation_terms(theta_n, theta_m)
    return L * np.sqrt(1 + 2 * a**2 * A - 2 * a * B)


def expanded_coupling(theta_n, theta_m, L, d, lam, delta_L=1.0):
    """Second-order small-d/L expansion of the four bond couplings.

    With beta = L/lam and a = d/L:
    Delta^{ij} ~ {1 + beta a B + [B^2 (1 + beta)/2 - A] beta a^2} Delta_L.
    """
    A, B = rotation_terms(theta_n, theta_m)
    a, beta = d / L, L / lam
    return (1 + beta * a * B + (B**2 * (1 + beta) / 2 - A) * beta * a**2) * delta_L


class DimerBondCouplings(NamedTuple):
    d11: float
    d12: float
    d21: float
    d22: float
    AA: float
    AS: float
    SA: float
    SS: float


def sa_transform(d11, d12, d21, d22):
    """(AA, AS, SA, SS) from the four site couplings of a dimer bond.

    A is the in-phase combination (site1 + site2)/sqrt(2), S the out-of-phase one.
    Works elementwise on arrays.
    """
    # grouped so that symmetric bonds give exact zeros in the mixed entries
    aa = 0.5 * ((d11 + d22) + (d12 + d21))
    as_ = 0.5 * ((d11 - d22) + (d21 - d12))
    sa = 0.5 * ((d11 - d22) + (d12 - d21))
    ss = 0.5 * ((d11 + d22) - (d12 + d21))
    return aa, as_, sa, ss


def sa_inverse(aa, as_, sa, ss):
    # the transform matrix is symmetric and squares to the identity
    return sa_transform(aa, as_, sa, ss)


def bond_couplings(theta_n, theta_m, L, d, model: CouplingModel = CouplingModel()) -> DimerBondCouplings:
    D = coupling_strength(dimer_pair_distances(theta_n, theta_m, L, d), model)
    site = (D[0, 0], D[0, 1], D[1, 0], D[1, 1])
    return DimerBondCouplings(*site, *sa_transform(*site))


def _warn_alpha(L, d):
    if d / L > 0.3:
        warnings.warn(f"d/L = {d / L:.3g} is not small; second-order closed forms are unreliable", stacklevel=3)


def closed_form_SS(n, omega, L, d, lam, delta_L):
    """Second-order S-S coupling of bond n (1-based).

    (2 d^2 / (lam L)) {cos t_n cos t_{n+1} - (L/lam) sin t_n sin t_{n+1}} Delta_L,
    which for L = lam reduces to (2 d^2/L^2) cos[omega (2n - 1)] Delta_L.
    """
    _warn_alpha(L, d)
    n = np.asarray(n, dtype=float)
    t1, t2 = omega * (n - 1), omega * n
    if np.isclose(L, lam, rtol=1e-14, atol=0):
        return 2 * d**2 / L**2 * np.cos(omega * (2 * n - 1)) * delta_L
    return 2 * d**2 / (lam * L) * (np.cos(t1) * np.cos(t2) - L / lam * np.sin(t1) * np.sin(t2)) * delta_L


def aa_parameters(L, d, lam, reading: str = "d/L"):
    """(alpha, beta, gamma_AA, amplitude) for the A-A closed form.

    The default reading uses alpha_dl = d/L and beta = L/lam, the ratios the
    second-order expansion is actually written in. reading="L/d" uses
    alpha_ld = L/d and beta = d/lam instead; it is kept only so the two
    readings can be compared against exact couplings.
    amplitude = beta alpha^2 (beta + 1) / gamma_AA is the relative modulation.
    """
    if reading == "L/d":
        alpha_ld, beta = L / d, d / lam
        gamma_AA = 2 + beta * alpha_ld**2 * (beta - 1)
        return alpha_ld, beta, gamma_AA, beta * alpha_ld**2 * (beta + 1) / gamma_AA
    if reading != "d/L":
        raise InvalidParameter(f"unknown reading {reading!r}")
    alpha_dl = d / L
    beta = L / lam
    gamma_AA = 2 + beta * alpha_dl**2 * (beta - 1)
    amp = beta * alpha_dl**2 * (beta + 1) / gamma_AA
    return alpha_dl, beta, gamma_AA, amp


def closed_form_AA(n, omega, L, d, lam, delta_L):
    """Second-order A-A coupling of bond n (1-based).

    gamma {1 - (beta a^2 (beta+1)/gamma) cos(omega) cos[omega (2n-1)]} Delta_L
    """
    _warn_alpha(L, d)
    n = np.asarray(n, dtype=float)
    _, _, g, amp = aa_parameters(L, d, lam)
    return g * (1 - amp * np.cos(omega) * np.cos(omega * (2 * n - 1))) * delta_L


def polar_matrix(phi, theta, chi, scale=1.0):
    R = np.array([[np.cos(phi), np.sin(phi)], [-np.sin(phi), np.cos(phi)]])
    P = np.array([[np.exp(theta) * np.cosh(chi), np.sinh(chi)],
                  [np.sinh(chi), np.exp(-theta) * np.cosh(chi)]])
    return scale * R @ P


def polar_parameters(h):
    """(phi, theta, chi, scale) with h = scale * R(phi) P(theta, chi).

    The block is first divided by sqrt|det h| so that P has unit determinant.
    """
    h = np.asarray(h, dtype=float)
    if h.shape != (2, 2):
        raise InvalidParameter("polar form needs a 2x2 block")
    det = np.linalg.det(h)
    if abs(det) <= 1e-14 * max(np.abs(h).max(), 1e-300) ** 2:
        raise DecompositionFailure("singular bond block")
    if det < 0:
        raise DecompositionFailure("bond block has negative determinant, no rotation-times-positive form")
    scale = np.sqrt(det)
    U, P = scipy.linalg.polar(h / scale, side="right")
    phi = np.arctan2(U[0, 1], U[0, 0])
    chi = np.arcsinh(P[0, 1])
    theta = 0.5 * np.log(P[0, 0] / P[1, 1])
    return float(phi), float(theta), float(chi), float(scale)


def gamma_polar(d11, d12, d21, d22):
    return (d12 - d21) ** 2 + (d11 + d22) ** 2


def polar_diagonal(d11, d12, d21, d22):
    """Closed-form diagonal of the (unnormalized) positive polar factor of the
    S/A-basis block, from the four site couplings.

    Returns (scale e^theta cosh chi, scale e^-theta cosh chi).
    """
    g = gamma_polar(d11, d12, d21, d22)
    x = d11 * d12 + d21 * d22
    return (2 * x + g) / (2 * np.sqrt(g)), (-2 * x + g) / (2 * np.sqrt(g))
