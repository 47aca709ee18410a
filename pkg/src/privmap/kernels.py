"""Kernel backend selection.

The Cython extension ``privmap._kernels`` is used when it was built;
otherwise the numpy implementation in ``privmap._kernels_py`` is used.
Set ``PRIVMAP_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("PRIVMAP_PURE_PYTHON", "") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
_impl = _compiled if _compiled is not None else _kernels_py

output_trace_norms = _impl.output_trace_norms
