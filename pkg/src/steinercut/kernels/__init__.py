"""Kernel selection: compiled extension when available, else pure python.

Set ``STEINERCUT_PURE_PYTHON=1`` to force the fallback (used by the
benchmark and the kernel parity tests).
"""

import os

from . import _py

if os.environ.get("STEINERCUT_PURE_PYTHON") == "1":
    _impl = _py
else:
    try:
        from steinercut import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _py

IMPL = _impl.IMPL
cut_capacity = _impl.cut_capacity
enumerate_steiner_cuts = _impl.enumerate_steiner_cuts
max_flow = _impl.max_flow


def implementations():
    """Both kernel implementations, for parity checks and benchmarks."""
    impls = {"python": _py}
    try:
        from steinercut import _speedups

        impls["cython"] = _speedups
    except ImportError:
        pass
    return impls
