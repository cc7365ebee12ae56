"""Integration kernels: compiled core with a pure-Python fallback.

The compiled extension is used when it imports; set ``LOEWNERLAB_PURE_PYTHON=1``
to force the fallback.  ``BACKEND`` names the active implementation.
"""
import os

from . import _pykernel

if os.environ.get("LOEWNERLAB_PURE_PYTHON", "") not in ("", "0"):
    _impl = None
else:
    try:
        from . import _ckernel as _impl
    except ImportError:
        _impl = None

BACKEND = "cython" if _impl is not None else "python"
OK, COLLAPSE, MAXSTEPS, SWALLOWED = _pykernel.OK, _pykernel.COLLAPSE, \
    _pykernel.MAXSTEPS, _pykernel.SWALLOWED


def tip_solve(driver, s, eps, rtol, atol, mode, record, node_v, w0=0.0, backend=None):
    if _use_c(backend):
        return _impl.tip_solve(driver.encoded, s, eps, rtol, atol, mode, record,
                               node_v, w0)
    return _pykernel.tip_solve(driver.py_encoded, s, eps, rtol, atol, mode, record,
                               node_v, w0)


def flow_solve(driver, z, t_end, sign, rtol, atol, guard, nodes, backend=None):
    if _use_c(backend):
        return _impl.flow_solve(driver.encoded, z, t_end, sign, rtol, atol, guard, nodes)
    return _pykernel.flow_solve(driver.py_encoded, z, t_end, sign, rtol, atol, guard, nodes)


def _use_c(backend):
    if backend is None:
        return _impl is not None
    if backend == "cython":
        if _impl is None:
            raise ImportError("compiled kernel is not available")
        return True
    if backend == "python":
        return False
    raise ValueError(f"unknown backend {backend!r}")
