"""Density matrices and generalized Bloch vectors.

``rho = (I + sum_i theta_i a_i) / n`` with ``theta_i = Tr(rho a_i)``. Bloch
vectors that do not correspond to a positive matrix are allowed; they are
needed to probe the outside of the classicality polytope.
"""
from __future__ import annotations

import json

import numpy as np

from . import linalg
from ._config import DEFAULT
from .errors import DimensionMismatch, JointMeasError
from .operator_basis import OperatorBasis, matrix_from_json, matrix_to_json


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based (Philox) generator keyed by an explicit 64-bit seed."""
    return np.random.Generator(np.random.Philox(int(seed) & 0xFFFFFFFFFFFFFFFF))


def check_density(rho, atol: float = DEFAULT.physical) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionMismatch(f"density matrix must be square, got {rho.shape}")
    if linalg.hermitian_deviation(rho) > atol:
        raise JointMeasError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > atol:
        raise JointMeasError(f"density matrix has trace {np.trace(rho).real:.12g}")
    if linalg.min_eigenvalue(rho) < -atol:
        raise JointMeasError("density matrix is not positive semidefinite")
    return rho


def bloch_from_density(rho, b: OperatorBasis) -> np.ndarray:
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (b.n, b.n):
        raise DimensionMismatch(f"state of shape {rho.shape} for basis of dimension {b.n}")
    theta = np.einsum("ij,aji->a", rho, b.ops)
    if np.abs(theta.imag).max() > 1e-10:
        raise JointMeasError("Bloch components have an imaginary residue; is rho Hermitian?")
    return theta.real


def density_from_bloch(theta, b: OperatorBasis,
                       atol: float = DEFAULT.physical) -> tuple[np.ndarray, bool]:
    """Return ``(rho, physical)``; ``physical`` means min eigenvalue >= -atol."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (b.dim,):
        raise DimensionMismatch(f"theta has shape {theta.shape}, basis needs ({b.dim},)")
    if not np.all(np.isfinite(theta)):
        raise ValueError("theta has non-finite entries")
    rho = (np.eye(b.n) + np.tensordot(theta, b.ops, axes=1)) / b.n
    return rho, linalg.min_eigenvalue(rho) >= -atol


def random_state(n: int, kind: str = "mixed", seed: int = 0) -> np.ndarray:
    """Haar-random pure state or Hilbert-Schmidt random mixed state."""
    if n < 2:
        raise ValueError("n must be >= 2")
    rng = make_rng(seed)
    if kind == "pure":
        psi = rng.normal(size=n) + 1j * rng.normal(size=n)
        psi /= np.linalg.norm(psi)
        return np.outer(psi, psi.conj())
    if kind == "mixed":
        g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        rho = g @ g.conj().T
        return rho / np.trace(rho).real
    raise ValueError(f"kind must be 'pure' or 'mixed', got {kind!r}")


def maximally_mixed(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128) / n


# -- state files --------------------------------------------------------------

def state_to_json(rho=None, theta=None) -> dict:
    if rho is not None:
        return {"kind": "density", "mat": matrix_to_json(rho)}
    return {"kind": "bloch", "theta": [float(x) for x in theta]}


def state_from_json(data: dict, b: OperatorBasis) -> np.ndarray:
    """Load a state file as a density matrix in the dimension of ``b``.

    Bloch-vector files may describe unphysical points; the returned matrix
    is then not positive.
    """
    kind = data.get("kind")
    if kind == "density":
        rho = matrix_from_json(data["mat"])
        if rho.shape != (b.n, b.n):
            raise DimensionMismatch(f"state of shape {rho.shape} for dimension {b.n}")
        return rho
    if kind == "bloch":
        rho, _ = density_from_bloch(np.asarray(data["theta"], dtype=float), b)
        return rho
    raise ValueError(f"unknown state kind {kind!r}")


def load_state(path, b: OperatorBasis) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        return state_from_json(json.load(fh), b)
