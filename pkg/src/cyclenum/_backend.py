"""Chooses between the compiled core and the pure-Python engines.

``CYCLENUM_BACKEND=python`` forces the fallback; ``native`` makes a missing
extension an import-time error instead of a silent fallback.
"""

from __future__ import annotations

import os

try:
    from . import _core  # type: ignore[attr-defined]
except ImportError:  # extension not built
    _core = None

_ENV = os.environ.get("CYCLENUM_BACKEND", "auto").lower()
if _ENV == "native" and _core is None:
    raise ImportError("CYCLENUM_BACKEND=native but the compiled core is not available")

NATIVE_AVAILABLE = _core is not None


def active() -> str:
    return "native" if NATIVE_AVAILABLE and _ENV != "python" else "python"


def use_native(requested: str = "auto", stats=None) -> bool:
    """Whether a run should go to the compiled core.  Vertex-level tracing is
    only implemented in Python."""
    if requested == "python" or (requested == "auto" and _ENV == "python"):
        return False
    if stats is not None and stats.track_vertices:
        if requested == "native":
            raise ValueError("vertex tracing is not available in the native backend")
        return False
    if not NATIVE_AVAILABLE:
        if requested == "native":
            raise RuntimeError("native backend requested but not built")
        return False
    return True


def native_simple(*args, **kw):
    from ._native import run_simple

    return run_simple(*args, **kw)


def native_temporal(*args, **kw):
    from ._native import run_temporal

    return run_temporal(*args, **kw)
