# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled cyclic Jacobi eigensolver for small dense Hermitian matrices.

Mirrors ``_jacobi_py`` operation for operation; the Python module is the
reference and the fallback when this extension is not built.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()


cdef inline double _abs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef int _jacobi(double complex[:, ::1] a, double complex[:, ::1] v,
                 bint want_vectors, double tol, int max_sweeps) noexcept nogil:
    """Diagonalize ``a`` in place; accumulate rotations into ``v``.

    Returns the number of sweeps used, or -1 if ``max_sweeps`` was hit.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef double norm2 = 0.0, off2, r, zeta, t, c, s, app, aqq
    cdef double complex e, ec, akp, akq, apk, aqk

    for p in range(n):
        for q in range(n):
            norm2 += _abs2(a[p, q])
    if norm2 == 0.0:
        return 0
    for sweep in range(max_sweeps + 1):
        off2 = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    off2 += _abs2(a[p, q])
        if off2 <= tol * tol * norm2:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                r = sqrt(_abs2(a[p, q]))
                if r == 0.0:
                    continue
                e = a[p, q] / r
                ec = e.conjugate()
                app = a[p, p].real
                aqq = a[q, q].real
                zeta = (aqq - app) / (2.0 * r)
                if fabs(zeta) > 1e150:
                    t = 0.5 / zeta
                elif zeta >= 0.0:
                    t = 1.0 / (zeta + sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + sqrt(1.0 + zeta * zeta))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                # U = [[c, s], [-s*conj(e), c*conj(e)]] on the (p, q) plane
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * ec * akq
                    a[k, q] = s * akp + c * ec * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * e * aqk
                    a[q, k] = s * apk + c * e * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - t * r
                a[q, q] = aqq + t * r
                if want_vectors:
                    for k in range(n):
                        akp = v[k, p]
                        akq = v[k, q]
                        v[k, p] = c * akp - s * ec * akq
                        v[k, q] = s * akp + c * ec * akq
    return -1


def jacobi_eigh(h, double tol, int max_sweeps):
    """Return ``(eigenvalues, eigenvectors, sweeps)``; unsorted, sweeps=-1 on failure."""
    cdef double complex[:, ::1] a = np.array(h, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t n = a.shape[0], i
    vv = np.eye(n, dtype=np.complex128)
    cdef double complex[:, ::1] v = vv
    cdef int sweeps
    with nogil:
        sweeps = _jacobi(a, v, True, tol, max_sweeps)
    w = np.empty(n, dtype=np.float64)
    for i in range(n):
        w[i] = a[i, i].real
    return w, vv, sweeps


def min_eigvals(stack, double tol, int max_sweeps):
    """Smallest eigenvalue of every matrix in a ``(K, n, n)`` stack.

    Returns ``(values, ok)`` where ``ok`` is False if any matrix failed to
    converge.
    """
    arr = np.array(stack, dtype=np.complex128, order="C", copy=True)
    cdef double complex[:, :, ::1] s = arr
    cdef Py_ssize_t kk = s.shape[0], n = s.shape[1], i, j
    out_arr = np.empty(kk, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double complex[:, ::1] dummy = np.zeros((1, 1), dtype=np.complex128)
    cdef double m
    cdef bint ok = True
    with nogil:
        for i in range(kk):
            if _jacobi(s[i], dummy, False, tol, max_sweeps) < 0:
                ok = False
            m = s[i, 0, 0].real
            for j in range(1, n):
                if s[i, j, j].real < m:
                    m = s[i, j, j].real
            out[i] = m
    return out_arr, ok
