"""Corner singularities and non-scattering for penetrable inhomogeneities.

Submodules
----------
specfun
    Legendre functions of real degree, spherical harmonics, cylinder functions.
cone_spectrum
    Singular exponents of sectors and circular cones.
helmholtz_series
    Local Fourier-Bessel / spherical expansions of Helmholtz solutions.
poly_cauchy
    Exact homogeneous polynomial algebra, Cauchy null spaces, special solutions.
scatter2d
    Volume integral solver, far fields, disk oracle and wavenumber sweeps.
cli
    Command-line front end.
"""
import logging

from ._kernels import BACKEND as KERNEL_BACKEND
from .errors import (CertificationError, ConvergenceError, DomainError, GeometryWarning,
                     ResolutionError, ResolutionWarning, SolverError)
from .geometry import BoundaryCondition, ConeGeometry, SectorGeometry, parse_angle

__version__ = "0.1.0"

logging.getLogger(__name__).addHandler(logging.NullHandler())

__all__ = ["KERNEL_BACKEND", "BoundaryCondition", "CertificationError", "ConeGeometry",
           "ConvergenceError", "DomainError", "GeometryWarning", "ResolutionError",
           "ResolutionWarning", "SectorGeometry", "SolverError", "parse_angle", "__version__"]
