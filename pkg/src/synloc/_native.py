"""Kernel-lane selection: compiled extension when available, else pure Python.

Set ``SYNLOC_KERNEL=python`` or ``SYNLOC_KERNEL=cython`` to force a lane
(the latter raises if the extension was not built).
"""

from __future__ import annotations

import os

_requested = os.environ.get("SYNLOC_KERNEL", "").strip().lower()
if _requested not in {"", "python", "cython"}:
    raise RuntimeError(f"SYNLOC_KERNEL must be 'python' or 'cython', got {_requested!r}")

if _requested == "python":
    from . import _wl_py as _impl

    KERNEL_LANE = "python"
else:
    try:
        from . import _wl_cy as _impl  # type: ignore[attr-defined]

        KERNEL_LANE = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        from . import _wl_py as _impl

        KERNEL_LANE = "python"

wl_kernel_core = _impl.wl_kernel_core
