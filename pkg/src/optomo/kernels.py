"""Kernel backend selection.

The compiled extension is used when it imports; otherwise, or when the
``OPTOMO_PURE_PYTHON`` environment variable is set to a non-empty value other
than ``0``, the pure-Python fallback is used. ``BACKEND`` names the choice.
"""

import os

from . import _pykernels

_force_pure = os.environ.get("OPTOMO_PURE_PYTHON", "") not in ("", "0")

if _force_pure:
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

floyd_warshall = _impl.floyd_warshall
rank_mod_p = _impl.rank_mod_p
UNREACHABLE = _pykernels.UNREACHABLE

__all__ = ["BACKEND", "UNREACHABLE", "floyd_warshall", "rank_mod_p"]
