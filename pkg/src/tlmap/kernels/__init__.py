"""Simulation kernels with a compiled fast path.

The per-sample recursions (LTI state update, ARX free run, all-pole
filtering) dominate experiment runtime, so they are compiled with Cython
when available. Importing this package picks the compiled backend if the
extension was built, otherwise the pure-Python fallback. ``BACKEND``
records which one is active; ``benchmarks/bench_kernels.py`` compares the
two.
"""

from tlmap.kernels import _pyloops

try:
    from tlmap.kernels import _cloops as _impl

    BACKEND = "compiled"
except ImportError:  # extension not built; pure-Python fallback
    _impl = _pyloops
    BACKEND = "python"

ss_simulate = _impl.ss_simulate
arx_free_run = _impl.arx_free_run
allpole_filter = _impl.allpole_filter


def backends():
    """Names of importable backends, compiled first if present."""
    names = []
    if BACKEND == "compiled":
        names.append("compiled")
    names.append("python")
    return names


__all__ = ["BACKEND", "ss_simulate", "arx_free_run", "allpole_filter", "backends"]
