"""Backend selection: compiled Cython kernel when available, numpy otherwise.

Set ``IONRES_PURE=1`` to force the pure-Python kernel (used by the
benchmark and the backend-parity tests).
"""

from __future__ import annotations

import os

from . import _core_py

if os.environ.get("IONRES_PURE", "") not in ("", "0"):
    _impl = _core_py
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _core_py

BACKEND = _impl.BACKEND
STATUS_OK = _core_py.STATUS_OK
STATUS_STEP_UNDERFLOW = _core_py.STATUS_STEP_UNDERFLOW
STATUS_INVARIANT = _core_py.STATUS_INVARIANT

integrate_interval = _impl.integrate_interval
incoherence = _impl.incoherence


def backend_name() -> str:
    return BACKEND
