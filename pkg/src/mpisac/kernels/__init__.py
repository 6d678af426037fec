"""Numeric kernels with a compiled fast path and a pure Python fallback.

The backend is picked once at import. Set MPISAC_KERNELS=reference to
force the fallback (used by the parity tests and the benchmark), or
MPISAC_KERNELS=native to fail loudly when the extension is missing.
Both backends produce bit-identical results by construction, so the
choice never changes program output, only speed.

Contract shared by both backends: array arguments are C-contiguous
float64, scalars are Python numbers. See _reference.py for semantics.
"""

import os

from . import _reference

_requested = os.environ.get("MPISAC_KERNELS", "").strip().lower()
_impl = None

if _requested in ("", "native"):
    try:
        from . import _native as _impl
    except ImportError:
        _impl = None
    if _impl is None and _requested == "native":
        raise ImportError(
            "MPISAC_KERNELS=native, but the compiled kernels are not built")
elif _requested in ("reference", "python"):
    _impl = None
else:
    raise ValueError(f"unrecognised MPISAC_KERNELS value: {_requested!r}")

if _impl is None:
    _impl = _reference

BACKEND = "native" if _impl is not _reference else "reference"

pb_tail_le = _impl.pb_tail_le
binom_tail_le = _impl.binom_tail_le
waterfill = _impl.waterfill

__all__ = ["BACKEND", "pb_tail_le", "binom_tail_le", "waterfill"]
