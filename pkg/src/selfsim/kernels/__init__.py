"""Hot loops of the transducer simulation.

The compiled extension ``_ckernels`` is used when it was built; otherwise the
NumPy implementation in ``_pykernels`` is loaded.  Setting the environment
variable ``SELFSIM_PURE=1`` forces the fallback.
"""
from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("SELFSIM_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

act_batch = _impl.act_batch
composite_children = _impl.composite_children
affine_batch = _impl.affine_batch


def available_backends() -> dict:
    """Map backend name to module for every backend importable in this process."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels

        found["cython"] = _ckernels
    except ImportError:
        pass
    return found


__all__ = ["BACKEND", "act_batch", "affine_batch", "composite_children", "available_backends"]
