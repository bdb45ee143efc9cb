"""Backend selection for the hot loops.

The compiled extension is preferred; set ``CSIT_DOF_BACKEND=python`` to
force the numpy fallback.
"""

import os

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _fallback}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

_requested = os.environ.get("CSIT_DOF_BACKEND", "").strip().lower()
if _requested and _requested not in ("python", "compiled"):
    raise ImportError(f"CSIT_DOF_BACKEND must be 'python' or 'compiled', got {_requested!r}")
if _requested == "compiled" and _compiled is None:
    raise ImportError("CSIT_DOF_BACKEND=compiled but csit_dof._kernels is not built")

BACKEND = _requested or ("compiled" if _compiled is not None else "python")


def get(name: str | None = None):
    """Kernel module for ``name`` (default: the active backend)."""
    return BACKENDS[name or BACKEND]


def slot_rate_sums(H, served, n_served, precoded, snr, cond_max, backend=None):
    return get(backend).slot_rate_sums(H, served, n_served, precoded, snr, cond_max)


def vertex_max(A, b, w, cond_max, feas_tol, tie_tol, backend=None):
    return get(backend).vertex_max(A, b, w, cond_max, feas_tol, tie_tol)
