"""Numerical laboratory for nodal-set statistics of random eigenfunctions
on the flat torus: exact lattice combinatorics, a Gaussian ensemble,
Leray-measure estimators, moment quadrature, and Monte Carlo experiments.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .errors import (
    CapacityError,
    DomainError,
    EmptyEnsembleError,
    GeometryError,
    HypothesisError,
    PreconditionError,
    ResolutionError,
    TorusLerayError,
)

__all__ = [
    "BACKEND",
    "CapacityError",
    "DomainError",
    "EmptyEnsembleError",
    "GeometryError",
    "HypothesisError",
    "PreconditionError",
    "ResolutionError",
    "TorusLerayError",
    "__version__",
]
