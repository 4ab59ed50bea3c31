"""Two-dimensional transmission scattering by penetrable inhomogeneities."""
from .contrast import (ContrastField, disk_contrast, polygon_contrast, sector_contrast,
                       square_vertices, triangle_vertices, with_q0, zero_contrast)
from .farfield import (FarFieldPattern, far_field, far_field_at, farfield_constant,
                       optical_theorem_residual)
from .incident import IncidentField, herglotz, incident_values, plane_wave, point_source
from .oracle import DiskOracle, disk_oracle, mode_determinant, transmission_eigenvalues
from .solver import TotalField, check_resolution, required_grid_size, solve
from .sweep import SweepEntry, SweepTable, calibrated_floor, sweep
from .transmission import fornberg_weights, sample_normal_lines, transmission_residual

__all__ = ["ContrastField", "DiskOracle", "FarFieldPattern", "IncidentField", "SweepEntry",
           "SweepTable", "TotalField", "calibrated_floor", "check_resolution", "disk_contrast",
           "disk_oracle", "far_field", "far_field_at", "farfield_constant", "fornberg_weights",
           "herglotz", "incident_values", "mode_determinant", "optical_theorem_residual",
           "plane_wave", "point_source", "polygon_contrast", "required_grid_size",
           "sample_normal_lines", "sector_contrast", "solve", "square_vertices", "sweep",
           "transmission_eigenvalues", "transmission_residual", "triangle_vertices", "with_q0",
           "zero_contrast"]
