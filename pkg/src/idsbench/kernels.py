"""Select the compiled kernels when built, the numpy ones otherwise.

Set ``IDSBENCH_PURE_PYTHON=1`` to force the numpy backend.
"""

from __future__ import annotations

import os

from . import _kernels_py

GINI, GAIN_RATIO, SSE = _kernels_py.GINI, _kernels_py.GAIN_RATIO, _kernels_py.SSE

_compiled = None
if not os.environ.get("IDSBENCH_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined, no-redef]
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def get_backend(name: str | None = None):
    """Kernel module by name ("cython" / "python"); default is the active one."""
    if name is None:
        name = BACKEND
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built; reinstall without IDSBENCH_NO_EXT")
        return _compiled
    raise ValueError(f"unknown kernel backend {name!r}")


_active = get_backend()
best_split = _active.best_split
partition = _active.partition
pegasos = _active.pegasos
