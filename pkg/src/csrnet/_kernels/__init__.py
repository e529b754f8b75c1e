"""Hot kernels with a compiled core and a pure-Python fallback.

The compiled extension is used when importable; setting ``CSRNET_PURE_PYTHON=1``
forces the fallback. ``BACKEND`` names the active one.
"""
from __future__ import annotations

import os

from . import _fallback

fallback = _fallback

if os.environ.get("CSRNET_PURE_PYTHON", "") not in ("", "0"):
    _core = None
else:
    try:
        from . import _core
    except ImportError:  # extension not built
        _core = None

compiled = _core
active = _core if _core is not None else _fallback
BACKEND = "compiled" if _core is not None else "python"

levenshtein = active.levenshtein
close_pairs = active.close_pairs
poibin_tail = active.poibin_tail
louvain_sweep = active.louvain_sweep


def backends() -> dict:
    """Available kernel modules keyed by name (for tests and benchmarks)."""
    out = {"python": _fallback}
    if _core is not None:
        out["compiled"] = _core
    return out
