"""Hot-loop kernels, compiled when available.

The Cython extension ``qcomm._kernels`` is used if it was built; otherwise
the numpy/pure-Python versions from ``qcomm._kernels_py`` are used.  Set
``QCOMM_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("QCOMM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py

pack_fixed = _impl.pack_fixed
unpack_fixed = _impl.unpack_fixed
pointer_walk = _impl.pointer_walk
disj_membership = _impl.disj_membership

__all__ = ["BACKEND", "pack_fixed", "unpack_fixed", "pointer_walk", "disj_membership"]
