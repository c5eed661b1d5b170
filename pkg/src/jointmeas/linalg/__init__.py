"""Dense Hermitian primitives for small matrices (n <= 8 in practice).

The eigensolver is a cyclic Jacobi iteration. A compiled Cython build is
used when available; otherwise the pure-Python implementation is selected at
import. Set ``JOINTMEAS_PURE_PYTHON=1`` to force the fallback, or call
:func:`use_backend` at runtime.
"""
from __future__ import annotations

import os
from typing import NamedTuple

import numpy as np

from .._config import DEFAULT, Tolerances
from ..errors import NoConvergence, NonHermitian
from . import _jacobi_py

try:
    from . import _jacobi as _jacobi_ext
except ImportError:  # extension not built
    _jacobi_ext = None

_BACKENDS = {"python": _jacobi_py}
if _jacobi_ext is not None:
    _BACKENDS["cython"] = _jacobi_ext

if _jacobi_ext is not None and not os.environ.get("JOINTMEAS_PURE_PYTHON"):
    BACKEND = "cython"
else:
    BACKEND = "python"
_impl = _BACKENDS[BACKEND]


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def use_backend(name: str) -> str:
    """Switch the eigensolver backend; returns the previous backend name."""
    global BACKEND, _impl
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}")
    previous = BACKEND
    BACKEND, _impl = name, _BACKENDS[name]
    return previous


class HermEig(NamedTuple):
    eigenvalues: np.ndarray   # ascending
    eigenvectors: np.ndarray  # orthonormal columns


def hermitian_deviation(h) -> float:
    h = np.asarray(h)
    return float(np.linalg.norm(h - h.conj().T))


def _symmetrized(h, tol: Tolerances) -> np.ndarray:
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise ValueError("matrix has non-finite entries")
    dev = hermitian_deviation(h)
    if dev > tol.hermitian_check * max(1.0, float(np.linalg.norm(h))):
        raise NonHermitian(f"||H - H^dag||_F = {dev:.3e}")
    return 0.5 * (h + h.conj().T)


def _fix_phase(vecs: np.ndarray) -> np.ndarray:
    # first component of largest modulus made real positive
    out = vecs.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        mods = np.abs(col)
        k = int(np.argmax(mods >= mods.max() - 1e-12))
        out[:, j] = col * (abs(col[k]) / col[k])
    return out


def herm_eig(h, tol: Tolerances = DEFAULT) -> HermEig:
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues are sorted ascending. Each eigenvector has its first
    largest-modulus component made real positive; eigenvalues that tie
    within ``tol.degenerate_eig`` are ordered lexicographically by their
    phase-fixed eigenvector entries.
    """
    a = _symmetrized(h, tol)
    w, v, sweeps = _impl.jacobi_eigh(a, tol.jacobi_offdiag, tol.jacobi_max_sweeps)
    if sweeps < 0:
        raise NoConvergence(f"Jacobi did not converge in {tol.jacobi_max_sweeps} sweeps")
    v = _fix_phase(v)
    scale = tol.degenerate_eig * max(1.0, float(np.abs(w).max(initial=0.0)))
    # bucket near-equal eigenvalues, then compare vectors within a bucket
    order = sorted(range(len(w)), key=lambda j: w[j])
    keyed = []
    bucket = 0
    for pos, j in enumerate(order):
        if pos and w[j] - w[order[pos - 1]] > scale:
            bucket += 1
        vec_key = tuple(x for z in np.round(v[:, j], 10) for x in (z.real, z.imag))
        keyed.append((bucket, vec_key, j))
    perm = [j for _, _, j in sorted(keyed)]
    return HermEig(w[perm], v[:, perm])


def unitary_exp(h, s: float = 1.0, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Return ``exp(i s H)`` for Hermitian ``H`` via its eigendecomposition."""
    w, v = herm_eig(h, tol)
    return (v * np.exp(1j * s * w)) @ v.conj().T


def min_eigenvalue(h, tol: Tolerances = DEFAULT) -> float:
    a = _symmetrized(h, tol)
    vals, ok = _impl.min_eigvals(a[None], tol.jacobi_offdiag, tol.jacobi_max_sweeps)
    if not ok:
        raise NoConvergence(f"Jacobi did not converge in {tol.jacobi_max_sweeps} sweeps")
    return float(vals[0])


def min_eigenvalues(stack, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Smallest eigenvalue of each matrix in a ``(K, n, n)`` Hermitian stack."""
    stack = np.asarray(stack, dtype=np.complex128)
    if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
        raise ValueError(f"expected a (K, n, n) stack, got shape {stack.shape}")
    herm = stack.conj().transpose(0, 2, 1)
    dev = np.linalg.norm(stack - herm, axis=(1, 2))
    norms = np.maximum(1.0, np.linalg.norm(stack, axis=(1, 2)))
    if np.any(dev > tol.hermitian_check * norms):
        raise NonHermitian(f"max ||H - H^dag||_F = {dev.max():.3e}")
    vals, ok = _impl.min_eigvals(0.5 * (stack + herm), tol.jacobi_offdiag,
                                 tol.jacobi_max_sweeps)
    if not ok:
        raise NoConvergence(f"Jacobi did not converge in {tol.jacobi_max_sweeps} sweeps")
    return np.asarray(vals)


def is_psd(h, atol: float = DEFAULT.psd) -> bool:
    return min_eigenvalue(h) >= -atol


__all__ = [
    "BACKEND",
    "HermEig",
    "available_backends",
    "herm_eig",
    "hermitian_deviation",
    "is_psd",
    "min_eigenvalue",
    "min_eigenvalues",
    "unitary_exp",
    "use_backend",
]
