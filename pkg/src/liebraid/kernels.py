"""Numeric kernel dispatch.

The compiled extension is used when it imports; otherwise (or when
``LIEBRAID_PURE_PYTHON=1``) the numpy fallback is used.  ``BACKEND`` names
the active implementation.
"""

from __future__ import annotations

import os

from . import _fallback

if os.environ.get("LIEBRAID_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"
else:
    _impl = _fallback
    BACKEND = "python"

sphere_rk4 = _impl.sphere_rk4
sphere_rk4_trajectory = _impl.sphere_rk4_trajectory
kz_segment = _impl.kz_segment

__all__ = ["BACKEND", "sphere_rk4", "sphere_rk4_trajectory", "kz_segment"]
