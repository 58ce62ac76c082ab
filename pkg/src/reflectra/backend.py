"""Selection of the propagation kernel backend.

The compiled Cython kernel is preferred when it importable; otherwise the
NumPy implementation is used. ``REFLECTRA_BACKEND=numpy|ext`` overrides the
choice (useful for benchmarking and for debugging kernel discrepancies).
"""

import os

from . import _sweep_np

try:
    from . import _sweep as _sweep_ext
except ImportError:
    _sweep_ext = None


def available_backends() -> dict:
    out = {"numpy": _sweep_np}
    if _sweep_ext is not None:
        out["ext"] = _sweep_ext
    return out


def _select():
    forced = os.environ.get("REFLECTRA_BACKEND", "").strip().lower()
    if forced:
        table = available_backends()
        if forced not in table:
            raise RuntimeError(
                f"REFLECTRA_BACKEND={forced!r} is not available; "
                f"choices: {sorted(table)}"
            )
        return table[forced]
    return _sweep_ext if _sweep_ext is not None else _sweep_np


_active = _select()

BACKEND_NAME = _active.BACKEND_NAME
propagate = _active.propagate
