"""Kernel backend selection.

The compiled extension is used when it imports cleanly. Setting the
environment variable ``CORNERSCATTER_PURE_PYTHON=1`` forces the
pure-Python fallback, which is what the benchmark and the parity tests use.
"""
import logging
import os

from . import _pykernels

logger = logging.getLogger(__name__)

_FORCE_PURE = os.environ.get("CORNERSCATTER_PURE_PYTHON", "").strip() not in ("", "0")

if _FORCE_PURE:
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on the build
        logger.debug("compiled kernels unavailable, using pure Python")
        _impl = _pykernels
        BACKEND = "python"

legendre_p = _impl.legendre_p
legendre_p_dt = _impl.legendre_p_dt
legendre_p_dt2 = _impl.legendre_p_dt2
legendre_p_many = _impl.legendre_p_many
legendre_p_dt_many = _impl.legendre_p_dt_many
clipped_area = _impl.clipped_area
polygon_fractions = _impl.polygon_fractions
circle_box_area = _impl.circle_box_area
disk_fractions = _impl.disk_fractions

__all__ = [
    "BACKEND", "legendre_p", "legendre_p_dt", "legendre_p_dt2", "legendre_p_many",
    "legendre_p_dt_many", "clipped_area", "polygon_fractions", "circle_box_area",
    "disk_fractions",
]
