"""Kernel selection: compiled extension when available, pure numpy otherwise.

Set ``TORUSWORD_PURE=1`` in the environment to force the pure fallback.
"""

from __future__ import annotations

import os

if os.environ.get("TORUSWORD_PURE"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

IMPLEMENTATION = _impl.IMPLEMENTATION

count_factors = _impl.count_factors
code_orbit_interval = _impl.code_orbit_interval
code_orbit_pgram = _impl.code_orbit_pgram
