"""Traversal kernels with a compiled core and a pure-Python fallback.

The compiled module is used when it was built and ``GRAPHBAND_PURE_PYTHON``
is unset or ``0``. ``BACKEND`` names the active implementation.
"""
import os

from . import _pykernels

if os.environ.get("GRAPHBAND_PURE_PYTHON", "0") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

spt = _impl.spt
spt_measures = _impl.spt_measures
greedy_one_hop = _impl.greedy_one_hop
multi_source_bfs = _impl.multi_source_bfs


def available_backends():
    """Map backend name to kernel module for every importable implementation."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out


__all__ = [
    "BACKEND",
    "available_backends",
    "greedy_one_hop",
    "multi_source_bfs",
    "spt",
    "spt_measures",
]
