"""Numerical laboratory for the tripod sub-wavelength optical lattice.

Computes Bloch bands, linewidths, Wannier functions and tight-binding
parameters of a one-dimensional tripod-coupled lattice by three
independent routes (full four-state diagonalization, adiabatic
dark-state projection, transfer-matrix scattering) and cross-validates
them.  Internal units: lattice constant a = 1 and recoil energy
E_R = 1, so 2m = pi^2.
"""

__version__ = "0.1.0"

from .params import LatticeParams, ParamError, validate  # noqa: F401
