"""Kernel backend selection.

Uses the compiled extension when it imported cleanly, otherwise the pure
Python fallback. Both produce bit-identical output; the switch only affects
speed. Set PAIRTRADE_PURE_PYTHON=1 to force the fallback.
"""

from __future__ import annotations

import os

if os.environ.get("PAIRTRADE_PURE_PYTHON"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl  # type: ignore[no-redef]

        BACKEND = "python"

ou_recursion = _impl.ou_recursion
trade_scan = _impl.trade_scan

__all__ = ["BACKEND", "ou_recursion", "trade_scan"]
