"""Pure-numpy implementation of the hot kernels.

Mirrors the API of the compiled ``_native`` module.  Eigendecomposition is
delegated to LAPACK (``numpy.linalg.eigh``) here; the compiled module carries
its own cyclic-Jacobi solver.  Both satisfy the same accuracy contract and
the projection loop below is semantically identical to the compiled one, so
verdicts agree between backends up to floating-point roundoff.
"""

from __future__ import annotations

import numpy as np

STATUS_FEASIBLE = 0
STATUS_INFEASIBLE = 1
STATUS_UNDECIDED = 2


def eigh_desc(h, offdiag_tol=1e-13, max_sweeps=100):
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""
    w, v = np.linalg.eigh(h)
    order = np.argsort(-w, kind="stable")
    return np.ascontiguousarray(w[order]), np.ascontiguousarray(v[:, order])


def _psd_project_batch(w):
    lam, vec = np.linalg.eigh(w)
    np.clip(lam, 0.0, None, out=lam)
    return np.einsum("vij,vj,vkj->vik", vec, lam, vec.conj())


def dykstra_masked(init, memb, minv, targets, tol, max_iter,
                   stag_window, stag_eps, offdiag_tol=1e-13, max_sweeps=100):
    """Dykstra alternating projections between the product PSD cone and the
    affine set {sum over each membership mask = target}.

    Returns ``(status, residual, iterations, matrices)`` where ``matrices``
    is the PSD iterate whose affine-constraint violation equals ``residual``.
    """
    membf = memb.astype(float)

    def project_affine(g):
        r = np.einsum("iv,vjk->ijk", membf, g) - targets
        c = np.einsum("im,mjk->ijk", minv, r)
        return g - np.einsum("iv,ijk->vjk", membf, c), r

    x, _ = project_affine(np.array(init, dtype=complex))
    p = np.zeros_like(x)
    y = x
    res = np.inf
    best = np.inf
    window_best = np.inf
    it = 0
    for it in range(1, int(max_iter) + 1):
        w = x + p
        y = _psd_project_batch(w)
        p = w - y
        x, r = project_affine(y)
        res = float(np.sqrt((np.abs(r) ** 2).sum()))
        if res < best:
            best = res
        if res <= tol:
            return STATUS_FEASIBLE, res, it, y
        if it % int(stag_window) == 0:
            if window_best - best < stag_eps and best > 10.0 * tol:
                return STATUS_INFEASIBLE, res, it, y
            window_best = best
    return STATUS_UNDECIDED, res, it, y
