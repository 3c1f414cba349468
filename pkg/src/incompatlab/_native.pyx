# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: cyclic-Jacobi Hermitian eigensolver and the Dykstra
product-PSD-cone / affine-set projection loop.

The pure-numpy twin lives in ``_purekernel``; both expose the same API and
status codes.
"""

import numpy as np

from libc.math cimport fabs, sqrt

STATUS_FEASIBLE = 0
STATUS_INFEASIBLE = 1
STATUS_UNDECIDED = 2


cdef int _jacobi(double complex[:, ::1] a, double[::1] w, double complex[:, ::1] v,
                 int n, double offdiag_tol, int max_sweeps) noexcept nogil:
    """Diagonalize Hermitian ``a`` in place; eigenvectors accumulate in ``v``.

    On success the descending eigenvalues are in ``w`` with matching columns
    of ``v``, and the return value is the number of sweeps used.  Returns -1
    if the off-diagonal mass fails to fall below the threshold.
    """
    cdef int sweep, p, q, k, i, j, m, done
    cdef double offsq, scale, g, alpha, beta, tau, t, c, s, tmp
    cdef double complex phase, zp, zq

    for i in range(n):
        for j in range(n):
            v[i, j] = 1.0 if i == j else 0.0
    if n == 1:
        w[0] = a[0, 0].real
        return 0

    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += a[i, j].real * a[i, j].real + a[i, j].imag * a[i, j].imag
    scale = sqrt(scale)
    if scale < 1.0:
        scale = 1.0

    done = -1
    for sweep in range(max_sweeps):
        offsq = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                offsq += 2.0 * (a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag)
        if sqrt(offsq) <= offdiag_tol * scale:
            done = sweep
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = abs(a[p, q])
                if g == 0.0:
                    continue
                alpha = a[p, p].real
                beta = a[q, q].real
                # negligible relative to the diagonal: zero it, skip rotation
                if g <= 1e-18 * (fabs(alpha) + fabs(beta)) or g < 1e-300:
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                phase = a[p, q] / g
                tau = (beta - alpha) / (2.0 * g)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                # A <- A J  (columns p, q)
                for k in range(n):
                    zp = a[k, p]
                    zq = a[k, q]
                    a[k, p] = c * zp - s * phase.conjugate() * zq
                    a[k, q] = s * phase * zp + c * zq
                # A <- J^dagger A  (rows p, q)
                for k in range(n):
                    zp = a[p, k]
                    zq = a[q, k]
                    a[p, k] = c * zp - s * phase * zq
                    a[q, k] = s * phase.conjugate() * zp + c * zq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                # V <- V J
                for k in range(n):
                    zp = v[k, p]
                    zq = v[k, q]
                    v[k, p] = c * zp - s * phase.conjugate() * zq
                    v[k, q] = s * phase * zp + c * zq
    if done < 0:
        return -1

    for i in range(n):
        w[i] = a[i, i].real
    # selection sort, descending, with eigenvector columns
    for i in range(n - 1):
        m = i
        for j in range(i + 1, n):
            if w[j] > w[m]:
                m = j
        if m != i:
            tmp = w[i]
            w[i] = w[m]
            w[m] = tmp
            for k in range(n):
                zp = v[k, i]
                v[k, i] = v[k, m]
                v[k, m] = zp
    return done


def eigh_desc(h, double offdiag_tol=1e-13, int max_sweeps=100):
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""
    a = np.array(h, dtype=np.complex128, order="C")
    cdef int n = a.shape[0]
    w = np.empty(n, dtype=np.float64)
    v = np.empty((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] amv = a
    cdef double[::1] wmv = w
    cdef double complex[:, ::1] vmv = v
    cdef int sweeps
    with nogil:
        sweeps = _jacobi(amv, wmv, vmv, n, offdiag_tol, max_sweeps)
    if sweeps < 0:
        raise RuntimeError("jacobi eigensolver did not converge")
    return w, v


def dykstra_masked(init, memb, minv, targets, double tol, long max_iter,
                   long stag_window, double stag_eps,
                   double offdiag_tol=1e-13, int max_sweeps=100):
    """Dykstra alternating projections between the product PSD cone and the
    affine set {sum over each membership mask = target}.

    Returns ``(status, residual, iterations, matrices)`` where ``matrices``
    is the PSD iterate whose affine-constraint violation equals ``residual``.
    """
    x = np.array(init, dtype=np.complex128, order="C")
    cdef unsigned char[:, ::1] mb = np.ascontiguousarray(memb, dtype=np.uint8)
    cdef double[:, ::1] mi = np.ascontiguousarray(minv, dtype=np.float64)
    tg = np.ascontiguousarray(targets, dtype=np.complex128)

    cdef long nvar = x.shape[0]
    cdef int d = x.shape[1]
    cdef long m = mb.shape[0]

    p = np.zeros_like(x)
    y = np.zeros_like(x)
    r = np.zeros((m, d, d), dtype=np.complex128)
    cbuf = np.zeros((m, d, d), dtype=np.complex128)
    wbuf = np.zeros((d, d), dtype=np.complex128)
    vbuf = np.zeros((d, d), dtype=np.complex128)
    wvals = np.zeros(d, dtype=np.float64)

    cdef double complex[:, :, ::1] xv = x
    cdef double complex[:, :, ::1] pv = p
    cdef double complex[:, :, ::1] yv = y
    cdef double complex[:, :, ::1] tv = tg
    cdef double complex[:, :, ::1] rv = r
    cdef double complex[:, :, ::1] cv = cbuf
    cdef double complex[:, ::1] wb = wbuf
    cdef double complex[:, ::1] vb = vbuf
    cdef double[::1] wl = wvals

    cdef long it = 0
    cdef long a
    cdef int i, j, k, l, status, fail, sweeps
    cdef double res = 0.0, res2, best, window_best, lam
    cdef double complex acc

    status = 2  # undecided
    fail = 0
    best = np.inf
    window_best = np.inf

    with nogil:
        # start on the affine set
        _affine_residual(xv, mb, tv, rv, nvar, m, d)
        _affine_apply(xv, xv, mb, mi, rv, cv, nvar, m, d)

        for it in range(1, max_iter + 1):
            for a in range(nvar):
                # store w = x + p in p, diagonalize a copy
                for i in range(d):
                    for j in range(d):
                        pv[a, i, j] = xv[a, i, j] + pv[a, i, j]
                        wb[i, j] = pv[a, i, j]
                sweeps = _jacobi(wb, wl, vb, d, offdiag_tol, max_sweeps)
                if sweeps < 0:
                    fail = 1
                    break
                # y = V clamp(w) V^dagger ; p = w - y
                for i in range(d):
                    for j in range(d):
                        acc = 0.0
                        for k in range(d):
                            lam = wl[k]
                            if lam > 0.0:
                                acc = acc + lam * vb[i, k] * vb[j, k].conjugate()
                        yv[a, i, j] = acc
                        pv[a, i, j] = pv[a, i, j] - acc
            if fail:
                break
            res2 = _affine_residual(yv, mb, tv, rv, nvar, m, d)
            res = sqrt(res2)
            _affine_apply(xv, yv, mb, mi, rv, cv, nvar, m, d)
            if res < best:
                best = res
            if res <= tol:
                status = 0  # feasible
                break
            if it % stag_window == 0:
                if window_best - best < stag_eps and best > 10.0 * tol:
                    status = 1  # infeasible
                    break
                window_best = best

    if fail:
        raise RuntimeError("jacobi eigensolver did not converge inside the projection loop")
    return status, res, it, y


cdef double _affine_residual(double complex[:, :, ::1] g, unsigned char[:, ::1] mb,
                             double complex[:, :, ::1] tv, double complex[:, :, ::1] rv,
                             long nvar, long m, int d) noexcept nogil:
    cdef long i, a
    cdef int j, k
    cdef double res2 = 0.0
    cdef double complex acc
    for i in range(m):
        for j in range(d):
            for k in range(d):
                acc = -tv[i, j, k]
                for a in range(nvar):
                    if mb[i, a]:
                        acc = acc + g[a, j, k]
                rv[i, j, k] = acc
                res2 += acc.real * acc.real + acc.imag * acc.imag
    return res2


cdef void _affine_apply(double complex[:, :, ::1] out, double complex[:, :, ::1] g,
                        unsigned char[:, ::1] mb, double[:, ::1] mi,
                        double complex[:, :, ::1] rv, double complex[:, :, ::1] cv,
                        long nvar, long m, int d) noexcept nogil:
    """out = g - memb^T (minv r); safe when out aliases g."""
    cdef long i, l, a
    cdef int j, k
    cdef double complex acc
    for i in range(m):
        for j in range(d):
            for k in range(d):
                acc = 0.0
                for l in range(m):
                    acc = acc + mi[i, l] * rv[l, j, k]
                cv[i, j, k] = acc
    for a in range(nvar):
        for j in range(d):
            for k in range(d):
                acc = g[a, j, k]
                for i in range(m):
                    if mb[i, a]:
                        acc = acc - cv[i, j, k]
                out[a, j, k] = acc
