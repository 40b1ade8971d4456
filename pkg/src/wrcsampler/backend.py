"""Kernel backend selection.

The compiled extension (``wrcsampler._kernel``) is preferred; the pure-Python
mirror (``wrcsampler._kernel_py``) is the fallback.  Both expose the same
functions with identical draw-level semantics.  Set WRCSAMPLER_BACKEND to
``python`` or ``cython`` to force a choice (forcing ``cython`` raises if the
extension was not built).
"""

from __future__ import annotations

import os

_forced = os.environ.get("WRCSAMPLER_BACKEND", "").strip().lower()

if _forced == "python":
    from . import _kernel_py as impl
elif _forced == "cython":
    from . import _kernel as impl  # type: ignore[no-redef]
else:
    try:
        from . import _kernel as impl  # type: ignore[no-redef]
    except ImportError:
        from . import _kernel_py as impl

BACKEND: str = impl.BACKEND


def active_backend() -> str:
    """Name of the kernel backend in use ('cython' or 'python')."""
    return BACKEND
