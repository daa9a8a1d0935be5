"""Polymer tight-binding lattices that emulate U(1), SU(2) and SU(3) gauge fields."""

from .coupling import CouplingModel, coupling_strength, sa_transform
from .geometry import (PolymerLattice, build_dimer_chain, build_hedgehog_lattice, build_square_lattice,
                       build_trimer_chain)
from .hamiltonian import HermitianOperator, assemble, dimer_basis_transform, reorganize_sa, trimer_basis_transform
from .spectral import SpectrumSweep, eigendecompose, flux_sweep, localization_report

__version__ = "0.1.0"
