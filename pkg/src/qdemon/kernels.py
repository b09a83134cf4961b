"""Backend selection for the structured Lindblad generator.

The compiled Cython kernel is used when it was built; otherwise, or when
``QDEMON_PURE_PYTHON=1`` is set, the numpy implementation takes over.  Both
share one signature, see ``_lindblad_py.lindblad_rhs``.
"""
from __future__ import annotations

import os

from . import _lindblad_py

try:
    from . import _lindblad as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _lindblad_py.lindblad_rhs}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled.lindblad_rhs

if os.environ.get("QDEMON_PURE_PYTHON") == "1" or _compiled is None:
    BACKEND = "python"
else:
    BACKEND = "compiled"

lindblad_rhs = BACKENDS[BACKEND]


def get_backend(name: str | None = None):
    if name is None:
        return lindblad_rhs
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
