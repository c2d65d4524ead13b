"""Exponents of Weyl group actions on weight lattices.

Exact computations of the truncated isomorphism ``phi_i`` between the group
ring of a weight lattice and its symmetric algebra, the exponents ``tau_i``,
Dynkin indices of fundamental orbits and torsion bounds, including the
non-crystallographic type H2 over the golden integers.
"""
from .exponents import ExponentReport, H2Report, compute_report, exponent_tau, h2_tau2
from .phi import phi_rho
from .rootsys import RootSystem, RootSystemKind, build, orbit
from .scalar import GoldenInt

__version__ = "0.1.0"

__all__ = [
    "ExponentReport",
    "GoldenInt",
    "H2Report",
    "RootSystem",
    "RootSystemKind",
    "build",
    "compute_report",
    "exponent_tau",
    "h2_tau2",
    "orbit",
    "phi_rho",
]
