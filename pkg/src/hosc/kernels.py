"""Kernel backend selection.

The compiled extension is used when it imports; set ``HOSC_PURE_PYTHON=1``
to force the pure-Python kernels.
"""

import os

from . import _pykernels

if os.environ.get("HOSC_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.BACKEND
Xoshiro = _impl.Xoshiro
SearchState = _impl.SearchState
run_search = _impl.run_search
decode_frame = _impl.decode_frame


def backend(name: str):
    """Return the kernel module called ``name`` (``"python"`` or ``"cython"``)."""
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")
