"""Hot kernels with a compiled backend and a numpy fallback.

The compiled extension ``_ckernels`` is used when it was built at install
time. Setting ``EULERWAVE_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("EULERWAVE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass

fan_conditions = _impl.fan_conditions
det_factored = _impl.det_factored
bump = _impl.bump
dbump = _impl.dbump
sector_weak_integrals = _impl.sector_weak_integrals


def available_backends():
    """Map backend name to module, for comparison runs."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels
        found["cython"] = _ckernels
    except ImportError:
        pass
    return found


__all__ = ["BACKEND", "fan_conditions", "det_factored", "bump", "dbump",
           "sector_weak_integrals", "available_backends"]
