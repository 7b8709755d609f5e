"""Loop-gas engine for the anisotropic Heisenberg lattice gas.

The model is represented as a gas of closed worldlines (composite loops) of a
compound Poisson process on Z^d.  The package computes the log-partition
function by cluster expansion, extracts the geometric (volume / surface /
edge / corner) coefficients of its large-box expansion, and checks the
convergence bounds numerically against independent oracles, including exact
diagonalization on small lattices.
"""

from loopgas.model import Potential, ModelParams, NormSet, compute_norms, convergence_diagnostics
from loopgas.loops import CompositeLoop, LoopConfiguration
from loopgas.pathint import SeriesEstimate, Truncation
from loopgas.geometry import Box, HalfSpace, GeometricCoefficients, fit_geometric

__all__ = [
    "Potential",
    "ModelParams",
    "NormSet",
    "compute_norms",
    "convergence_diagnostics",
    "CompositeLoop",
    "LoopConfiguration",
    "SeriesEstimate",
    "Truncation",
    "Box",
    "HalfSpace",
    "GeometricCoefficients",
    "fit_geometric",
]

__version__ = "0.1.0"
