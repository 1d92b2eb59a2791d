"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import time from ``SPNI_KERNELS``:

* ``numba`` - require the jitted kernels
* ``numpy`` - force the interpreted fallback
* unset / ``auto`` - numba when importable, else numpy

Both backends return identical results; only speed differs.
"""
import logging
import os

from . import _numpy

log = logging.getLogger(__name__)

INF = _numpy.INF

_choice = os.environ.get("SPNI_KERNELS", "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    raise ImportError(f"SPNI_KERNELS must be auto, numba or numpy, got {_choice!r}")

_impl = _numpy
BACKEND = "numpy"
if _choice != "numpy":
    try:
        from . import _numba as _impl  # noqa: F811

        BACKEND = "numba"
    except ImportError:
        if _choice == "numba":
            raise
        log.info("numba unavailable, using numpy kernels")

dijkstra = _impl.dijkstra
lengths_for_sets = _impl.lengths_for_sets
qubo_exhaustive = _impl.qubo_exhaustive
qubo_anneal = _impl.qubo_anneal


def backends():
    """Map of backend name to kernel module for every importable backend."""
    out = {"numpy": _numpy}
    try:
        from . import _numba

        out["numba"] = _numba
    except ImportError:
        pass
    return out


__all__ = [
    "BACKEND",
    "INF",
    "backends",
    "dijkstra",
    "lengths_for_sets",
    "qubo_anneal",
    "qubo_exhaustive",
]
