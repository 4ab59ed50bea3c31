"""Far-field norms over a range of wavenumbers, with an oracle-calibrated floor."""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import ConvergenceError, DomainError, ResolutionError, SolverError
from .contrast import ContrastField, disk_contrast
from .farfield import far_field
from .incident import IncidentField
from .oracle import disk_oracle
from .solver import solve

logger = logging.getLogger(__name__)

__all__ = ["SweepEntry", "SweepTable", "sweep", "calibrated_floor", "FLAG_FACTOR"]

FLAG_FACTOR = 10.0


@dataclass
class SweepEntry:
    k: float
    norm: float = float("nan")
    abs_min: float = float("nan")
    abs_max: float = float("nan")
    residual: float = float("nan")
    floor: float = float("nan")
    flagged: bool = False
    failed: bool = False
    message: str = ""


@dataclass
class SweepTable:
    entries: list = field(default_factory=list)

    @property
    def ks(self) -> np.ndarray:
        return np.array([e.k for e in self.entries])

    @property
    def norms(self) -> np.ndarray:
        return np.array([e.norm for e in self.entries])

    @property
    def flagged(self) -> list:
        return [e.k for e in self.entries if e.flagged]

    @property
    def failed(self) -> list:
        return [e.k for e in self.entries if e.failed]

    def as_dicts(self) -> list:
        return [asdict(e) for e in self.entries]


def calibrated_floor(contrast: ContrastField, inc: IncidentField, k: float,
                     n_angles: int = 128) -> float:
    """Far-field discretization error of an area-equivalent disk on the same grid.

    The disk has the same area, the same representative index ``q0`` and is
    centred at the origin; the returned value is the absolute ``L^2(S^1)``
    distance between the solver's and the oracle's far fields.
    """
    area = float(np.sum(contrast.fraction)) * contrast.cell_area
    if area == 0 or contrast.q0 == 1:
        return 0.0
    radius = math.sqrt(area / math.pi)
    disk = disk_contrast((0.0, 0.0), radius, contrast.q0, contrast.half_width, contrast.n)
    num = far_field(solve(disk, k, inc), n_angles)
    ref = disk_oracle(radius, contrast.q0, k, inc).far_field(n_angles)
    return num.distance(ref)


def sweep(contrast: ContrastField, inc: IncidentField, k_range, steps: int, *,
          floor="calibrated", n_angles: int = 128, strict_resolution: bool = False) -> SweepTable:
    """Far-field norm at ``steps`` equally spaced wavenumbers.

    An entry is flagged as a non-scattering candidate when its norm is zero
    or below ``FLAG_FACTOR`` times the floor. ``floor`` is ``"calibrated"``
    (see :func:`calibrated_floor`) or a fixed number. Solver failures are
    recorded and the sweep continues.
    """
    k_min, k_max = map(float, k_range)
    if not 0 < k_min <= k_max or steps < 1:
        raise DomainError("need 0 < k_min <= k_max and at least one step")
    table = SweepTable()
    for k in np.linspace(k_min, k_max, steps):
        entry = SweepEntry(float(k))
        try:
            tot = solve(contrast, k, inc, strict_resolution=strict_resolution)
            pat = far_field(tot, n_angles)
            entry.norm, entry.abs_min, entry.abs_max = pat.norm, pat.abs_min, pat.abs_max
            entry.residual = tot.residual
            entry.floor = calibrated_floor(contrast, inc, k, n_angles) if floor == "calibrated" \
                else float(floor)
            entry.flagged = entry.norm == 0 or entry.norm < FLAG_FACTOR * entry.floor
        except (SolverError, ConvergenceError, ResolutionError) as exc:
            entry.failed, entry.message = True, str(exc)
            logger.warning("sweep entry k=%g failed: %s", k, exc)
        table.entries.append(entry)
    return table
