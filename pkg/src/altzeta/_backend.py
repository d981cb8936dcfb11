"""Gibbs kernel backend selection.

The compiled extension is preferred when importable; ALTZETA_BACKEND=numpy or
=cython forces a choice.  Both backends are bit-identical by construction, so
selection affects speed only.
"""

from __future__ import annotations

import os

import numpy as np

from . import _gibbs_np
from .errors import DomainError

try:
    from . import _gibbs as _ext
except ImportError:
    _ext = None

_FORCED = os.environ.get("ALTZETA_BACKEND", "").strip().lower()
if _FORCED in ("", "auto"):
    _USE_EXT = _ext is not None
elif _FORCED in ("cython", "c", "ext", "compiled"):
    if _ext is None:
        raise ImportError("ALTZETA_BACKEND requests the compiled kernel, but it is not built")
    _USE_EXT = True
elif _FORCED in ("numpy", "py", "python"):
    _USE_EXT = False
else:
    raise ImportError(f"unknown ALTZETA_BACKEND value {_FORCED!r}")


def backend_name() -> str:
    return "cython" if _USE_EXT else "numpy"


def available_backends() -> tuple[str, ...]:
    return ("cython", "numpy") if _ext is not None else ("numpy",)


def gibbs_chunks(
    u_lanes: np.ndarray,
    uniforms: np.ndarray,
    keep: int,
    burn_in: int,
    thinning: int,
    nodes: np.ndarray,
    wts: np.ndarray,
    force: str | None = None,
) -> np.ndarray:
    """Dispatch one block of Gibbs chains to the selected backend."""
    u_c = np.ascontiguousarray(u_lanes, dtype=np.float64)
    un_c = np.ascontiguousarray(uniforms, dtype=np.float64)
    nd = np.ascontiguousarray(nodes, dtype=np.float64)
    wt = np.ascontiguousarray(wts, dtype=np.float64)
    if force is None:
        use_ext = _USE_EXT
    elif force == "cython":
        if _ext is None:
            raise DomainError("compiled backend requested but not built")
        use_ext = True
    elif force == "numpy":
        use_ext = False
    else:
        raise DomainError(f"unknown backend {force!r}")
    if use_ext:
        return _ext.gibbs_chunks(u_c, un_c, keep, burn_in, thinning, nd, wt)
    return _gibbs_np.gibbs_chunks(u_c, un_c, keep, burn_in, thinning, nd, wt)
