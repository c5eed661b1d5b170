"""Pure-Python cyclic Jacobi eigensolver (reference and fallback backend).

Works on nested lists of Python complex numbers, which is considerably
faster than element-wise numpy indexing for the n <= 8 matrices used here.
"""
from __future__ import annotations

import math

import numpy as np


def _jacobi(a, v, tol, max_sweeps):
    n = len(a)
    norm2 = sum((z.real * z.real + z.imag * z.imag) for row in a for z in row)
    if norm2 == 0.0:
        return 0
    thresh = tol * tol * norm2
    for sweep in range(max_sweeps + 1):
        off2 = 0.0
        for p in range(n):
            row = a[p]
            for q in range(n):
                if p != q:
                    z = row[q]
                    off2 += z.real * z.real + z.imag * z.imag
        if off2 <= thresh:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                r = abs(apq)
                if r == 0.0:
                    continue
                e = apq / r
                ec = e.conjugate()
                app = a[p][p].real
                aqq = a[q][q].real
                zeta = (aqq - app) / (2.0 * r)
                if abs(zeta) > 1e150:
                    t = 0.5 / zeta
                elif zeta >= 0.0:
                    t = 1.0 / (zeta + math.sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                sec = s * ec
                cec = c * ec
                for row in a:
                    akp = row[p]
                    akq = row[q]
                    row[p] = c * akp - sec * akq
                    row[q] = s * akp + cec * akq
                rp = a[p]
                rq = a[q]
                se = s * e
                ce = c * e
                for k in range(n):
                    apk = rp[k]
                    aqk = rq[k]
                    rp[k] = c * apk - se * aqk
                    rq[k] = s * apk + ce * aqk
                rp[q] = 0j
                rq[p] = 0j
                rp[p] = complex(app - t * r)
                rq[q] = complex(aqq + t * r)
                if v is not None:
                    for row in v:
                        akp = row[p]
                        akq = row[q]
                        row[p] = c * akp - sec * akq
                        row[q] = s * akp + cec * akq
    return -1


def jacobi_eigh(h, tol, max_sweeps):
    """Return ``(eigenvalues, eigenvectors, sweeps)``; unsorted, sweeps=-1 on failure."""
    h = np.asarray(h, dtype=np.complex128)
    n = h.shape[0]
    a = h.tolist()
    v = np.eye(n, dtype=np.complex128).tolist()
    sweeps = _jacobi(a, v, tol, max_sweeps)
    w = np.array([a[i][i].real for i in range(n)])
    return w, np.array(v, dtype=np.complex128), sweeps


def min_eigvals(stack, tol, max_sweeps):
    stack = np.asarray(stack, dtype=np.complex128)
    out = np.empty(stack.shape[0])
    ok = True
    for i, mat in enumerate(stack.tolist()):
        if _jacobi(mat, None, tol, max_sweeps) < 0:
            ok = False
        out[i] = min(mat[j][j].real for j in range(len(mat)))
    return out, ok
