"""Dense complex-Hermitian linear algebra and convex-cone primitives.

Matrices are plain ``numpy.ndarray`` of complex128 in row-major order; a
Hermitian operator is such a matrix equal to its conjugate transpose within
``Tolerances.hermiticity``.  The tensor-product convention is fixed repo-wide
as Alice (left Kronecker factor) times Bob (right factor).

Eigendecompositions route through the active kernel backend: the compiled
kernel runs a cyclic-Jacobi solver (off-diagonal Frobenius threshold 1e-13,
100-sweep cap), the pure-numpy fallback uses LAPACK.  Both meet the same
reconstruction contract and are exercised by the same tests.
"""

from __future__ import annotations

from typing import Literal

import numpy as np

from . import backend
from .config import DEFAULTS, Tolerances
from .errors import DomainError, NumericError


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite complex matrix (no NaN/Inf), C-ordered."""
    a = np.ascontiguousarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DomainError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise DomainError("matrix contains NaN or Inf entries")
    return a


def require_hermitian(h, tol: float | None = None) -> np.ndarray:
    """Validate that ``h`` is square and entrywise equal to its conjugate
    transpose within ``tol`` (default ``Tolerances.hermiticity``)."""
    a = as_matrix(h)
    if a.shape[0] != a.shape[1]:
        raise DomainError(f"matrix is not square: {a.shape}")
    tol = DEFAULTS.hermiticity if tol is None else tol
    dev = np.abs(a - a.conj().T).max()
    if dev > tol * max(1.0, np.abs(a).max()):
        raise NonHermitianError(f"matrix deviates from Hermitian by {dev:.3e}")
    return a


class NonHermitianError(DomainError):
    """Raised when an operation requires a Hermitian operator."""


def her_eig(h, tol: Tolerances = DEFAULTS) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian operator.

    Returns ``(w, v)`` with eigenvalues ``w`` sorted descending and unitary
    eigenvector columns ``v`` such that ``v @ diag(w) @ v.conj().T``
    reconstructs ``h`` within ``tol.eig_reconstruction`` (relative Frobenius).
    """
    a = require_hermitian(h, tol.hermiticity)
    try:
        w, v = backend.eigh_desc(a, tol.jacobi_offdiag, tol.jacobi_max_sweeps)
    except RuntimeError as exc:
        raise NumericError(str(exc)) from exc
    scale = max(1.0, float(np.linalg.norm(a)))
    rec = float(np.linalg.norm((v * w) @ v.conj().T - a))
    if rec > tol.eig_reconstruction * scale:
        raise NumericError(f"eigendecomposition reconstruction error {rec:.3e}")
    return w, v


def psd_project(h, tol: Tolerances = DEFAULTS) -> np.ndarray:
    """Frobenius-nearest positive semidefinite matrix (eigenvalues clamped)."""
    w, v = her_eig(h, tol)
    out = (v * np.clip(w, 0.0, None)) @ v.conj().T
    return (out + out.conj().T) / 2.0


def op_norm(h, tol: Tolerances = DEFAULTS) -> float:
    """Operator (spectral) norm: the largest eigenvalue magnitude."""
    w, _ = her_eig(h, tol)
    return float(np.abs(w).max())


def trace_norm(h, tol: Tolerances = DEFAULTS) -> float:
    """Trace norm: the sum of eigenvalue magnitudes."""
    w, _ = her_eig(h, tol)
    return float(np.abs(w).sum())


def tensor(a, b) -> np.ndarray:
    """Kronecker product, left factor = Alice subsystem."""
    return np.kron(as_matrix(a), as_matrix(b))


def hs_inner(a, b, tol: Tolerances = DEFAULTS) -> float:
    """Hilbert-Schmidt inner product Tr[a b] of two Hermitian operators."""
    am = require_hermitian(a, tol.hermiticity)
    bm = require_hermitian(b, tol.hermiticity)
    if am.shape != bm.shape:
        raise DomainError(f"dimension mismatch: {am.shape} vs {bm.shape}")
    val = complex(np.einsum("ij,ji->", am, bm))
    return float(val.real)


def partial_trace(m, dim_a: int, dim_b: int, keep: Literal["A", "B"]) -> np.ndarray:
    """Reduced operator on the kept subsystem of an (dim_a*dim_b)-dim operator."""
    a = as_matrix(m)
    if a.shape[0] != a.shape[1] or a.shape[0] != dim_a * dim_b:
        raise DomainError(f"operator shape {a.shape} does not factor as {dim_a}x{dim_b}")
    t = a.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "A":
        return np.ascontiguousarray(np.trace(t, axis1=1, axis2=3))
    if keep == "B":
        return np.ascontiguousarray(np.trace(t, axis1=0, axis2=2))
    raise DomainError(f"keep must be 'A' or 'B', got {keep!r}")
