"""Kernel backend selection.

The compiled Cython kernel is preferred when the extension built; the
pure-Python twin is the fallback. ``CHAINTRUST_KERNEL=py|cy`` forces a
backend (``cy`` raises if the extension is unavailable).
"""

from __future__ import annotations

import os
from types import ModuleType


def get_backend(name: str) -> ModuleType:
    """Load a kernel backend by name ('py' or 'cy')."""
    if name == "py":
        from . import _score_py

        return _score_py
    if name == "cy":
        from . import _score_cy  # type: ignore[attr-defined]

        return _score_cy
    raise ValueError(f"unknown kernel backend {name!r}")


def _select() -> ModuleType:
    forced = os.environ.get("CHAINTRUST_KERNEL", "auto").lower()
    if forced in ("py", "python", "pure"):
        return get_backend("py")
    if forced in ("cy", "cython", "compiled"):
        return get_backend("cy")
    try:
        return get_backend("cy")
    except ImportError:
        return get_backend("py")


kernel = _select()
BACKEND: str = kernel.BACKEND

evidence_at = kernel.evidence_at
row_contribution = kernel.row_contribution
trust_step_raw = kernel.trust_step_raw
trust_batch_raw = kernel.trust_batch_raw
