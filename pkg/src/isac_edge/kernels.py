"""Backend selection for the search kernels.

The compiled extension is used when it was built; otherwise the numpy
fallback. Set ``ISAC_EDGE_PURE=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("ISAC_EDGE_PURE", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

BACKEND = "cython" if _impl is not _kernels_py else "python"

beam_grid_search = _impl.beam_grid_search
simplex_minmax = _impl.simplex_minmax
