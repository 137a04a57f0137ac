"""Numeric backend selection.

Prefers the compiled extension ``rkstab._core`` and falls back to the
pure-Python mirror. Set ``RKSTAB_PURE_PY=1`` to force the fallback. Both
backends produce bit-identical results on one platform.
"""

from __future__ import annotations

import os

if os.environ.get("RKSTAB_PURE_PY", "0") not in ("", "0"):
    from . import _core_py as impl

    COMPILED = False
else:
    try:
        from . import _core as impl  # type: ignore[no-redef]

        COMPILED = True
    except ImportError:
        from . import _core_py as impl  # type: ignore[no-redef]

        COMPILED = False


def backend_name() -> str:
    """Name of the active numeric core: ``"compiled"`` or ``"python"``."""
    return "compiled" if COMPILED else "python"
