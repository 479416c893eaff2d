"""Hot numeric kernels with a compiled core and a pure-numpy fallback.

The only genuinely hot loop in the package is the containment distance:
min over lattice translates and target nodes of the distance from each
reduced sample.  The Cython extension implements it with early-exit loops;
the fallback uses chunked numpy broadcasting.  Both produce the same
results up to floating-point summation order.

Set TORUSFLOW_PURE=1 to force the fallback even when the extension built.
"""

import importlib
import os

from . import fallback

_forced = os.environ.get("TORUSFLOW_PURE", "") in ("1", "true", "yes")
_native = None
if not _forced:
    try:
        _native = importlib.import_module("._native", __name__)
    except ImportError:
        _native = None

if _native is not None:
    min_distance_batch = _native.min_distance_batch
    BACKEND = "native"
else:
    min_distance_batch = fallback.min_distance_batch
    BACKEND = "fallback"


def backend_name() -> str:
    return BACKEND


def available_backends():
    out = {"fallback": fallback.min_distance_batch}
    if _native is not None:
        out["native"] = _native.min_distance_batch
    return out
