"""Adaptive log-Laguerre spectral solver for the radial Dirac equation."""
from .potentials import (PhysicsConstants, QuantumState, Coulomb, GaussianNucleus, Yukawa, Hellmann,
                         Morse, Harmonic, make_potential, coulomb_exact_energy, coulomb_levels)
from .basis import GlobalBasisSpec, QuadratureOptions
from .assembly import SpinorLayout, assemble
from .eigensolve import solve_gep, EigenSolution

__all__ = [
    "PhysicsConstants", "QuantumState", "Coulomb", "GaussianNucleus", "Yukawa", "Hellmann", "Morse",
    "Harmonic", "make_potential", "coulomb_exact_energy", "coulomb_levels", "GlobalBasisSpec",
    "QuadratureOptions", "SpinorLayout", "assemble", "solve_gep", "EigenSolution",
]
__version__ = "0.1.0"
