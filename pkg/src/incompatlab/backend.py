"""Kernel backend selection.

The compiled extension ``incompatlab._native`` is preferred when importable;
otherwise the pure-numpy twin ``incompatlab._purekernel`` takes over.  Set
``INCOMPATLAB_BACKEND=native`` or ``=numpy`` to force a choice (forcing
``native`` when the extension is missing raises at import of this module).
"""

from __future__ import annotations

import os

from . import _purekernel

ENV_BACKEND = "INCOMPATLAB_BACKEND"

try:
    from . import _native
except ImportError:
    _native = None

_forced = os.environ.get(ENV_BACKEND)
if _forced not in (None, "", "native", "numpy"):
    raise RuntimeError(f"{ENV_BACKEND} must be 'native' or 'numpy', got {_forced!r}")
if _forced == "native" and _native is None:
    raise RuntimeError("INCOMPATLAB_BACKEND=native but the compiled kernel is not installed")

_kernel = _purekernel if (_forced == "numpy" or _native is None) else _native

STATUS_FEASIBLE = _purekernel.STATUS_FEASIBLE
STATUS_INFEASIBLE = _purekernel.STATUS_INFEASIBLE
STATUS_UNDECIDED = _purekernel.STATUS_UNDECIDED


def active_backend() -> str:
    """Name of the kernel in use: 'native' or 'numpy'."""
    return "native" if _kernel is _native else "numpy"


def get_kernel(name: str | None = None):
    """Return a kernel module by name, defaulting to the active one."""
    if name is None:
        return _kernel
    if name == "native":
        if _native is None:
            raise RuntimeError("compiled kernel is not installed")
        return _native
    if name == "numpy":
        return _purekernel
    raise ValueError(f"unknown backend {name!r}")


def eigh_desc(h, offdiag_tol: float = 1e-13, max_sweeps: int = 100):
    return _kernel.eigh_desc(h, offdiag_tol, max_sweeps)


def dykstra_masked(init, memb, minv, targets, tol, max_iter, stag_window,
                   stag_eps, offdiag_tol: float = 1e-13, max_sweeps: int = 100):
    return _kernel.dykstra_masked(init, memb, minv, targets, tol, max_iter,
                                  stag_window, stag_eps, offdiag_tol, max_sweeps)
