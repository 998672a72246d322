"""Kernel backend selection.

The compiled ``_core`` extension is used when it imports; otherwise the
numpy/heapq reference in ``_pykernels`` takes over. Setting
``COMPARISON_LAB_BACKEND=python`` forces the fallback.
"""
import os

from . import _pykernels


def _load_compiled():
    try:
        from . import _core
    except ImportError:
        return None
    return _core


def get_backend(name):
    """Return the kernel module for ``"cython"`` or ``"python"``."""
    if name == "python":
        return _pykernels
    if name == "cython":
        mod = _load_compiled()
        if mod is None:
            raise ImportError("compiled kernels are not built")
        return mod
    raise ValueError(f"unknown backend {name!r}")


def available_backends():
    return ["python"] + (["cython"] if _load_compiled() is not None else [])


_compiled = None if os.environ.get("COMPARISON_LAB_BACKEND") == "python" else _load_compiled()
_impl = _compiled if _compiled is not None else _pykernels
BACKEND = "cython" if _compiled is not None else "python"

dijkstra = _impl.dijkstra
versine_batch = _impl.versine_batch
side_from_versine_batch = _impl.side_from_versine_batch
second_differences = _impl.second_differences
one_sided_quotients = _impl.one_sided_quotients
