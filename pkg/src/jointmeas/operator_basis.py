"""Orthonormal Hermitian operator bases grouped into commuting families.

An :class:`OperatorBasis` holds ``N = n**2 - 1`` traceless Hermitian
operators normalized to ``Tr(a_i a_j) = n delta_ij``. The operators are split
into ``n + 1`` families of ``n - 1`` mutually commuting members; the shared
eigenbasis of each family is one mutually unbiased basis.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np

from . import linalg
from ._config import DEFAULT
from .errors import BadSpectra, DimensionMismatch
from .mub import MubFamily, build_mubs

_FAMILY_SEED = 7


@dataclass(frozen=True, eq=False)
class OperatorBasis:
    n: int
    ops: np.ndarray                      # (N, n, n)
    families: tuple[tuple[int, ...], ...]
    name: str = field(default="custom")

    def __post_init__(self):
        ops = np.asarray(self.ops, dtype=np.complex128)
        if ops.ndim != 3 or ops.shape[1:] != (self.n, self.n):
            raise DimensionMismatch(f"ops must have shape (N, {self.n}, {self.n}), got {ops.shape}")
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "families", tuple(tuple(int(i) for i in f) for f in self.families))

    @property
    def dim(self) -> int:
        """Number of operators (the Bloch-space dimension)."""
        return len(self.ops)

    @property
    def num_families(self) -> int:
        return len(self.families)

    @cached_property
    def _spectral(self):
        rng = np.random.default_rng(_FAMILY_SEED)
        vecs, tables = [], []
        for fam in self.families:
            coeffs = rng.normal(size=len(fam))
            combo = np.tensordot(coeffs, self.ops[list(fam)], axes=1)
            _, v = linalg.herm_eig(combo)
            z = np.einsum("ik,jil,lk->kj", v.conj(), self.ops[list(fam)], v).real
            # outcomes sorted by descending eigenvalue tuple
            keys = [tuple(-np.round(row, 9)) for row in z]
            order = sorted(range(self.n), key=lambda k: keys[k])
            vecs.append(v[:, order])
            tables.append(z[order])
        return vecs, tables

    @property
    def eigvecs(self) -> list[np.ndarray]:
        """Shared eigenbasis (columns) of each family, in outcome order."""
        return self._spectral[0]

    @property
    def eigentable(self) -> list[np.ndarray]:
        """``eigentable[m][k, j]``: eigenvalue of family member j on outcome k."""
        return self._spectral[1]

    def outcome_tuples(self) -> np.ndarray:
        """All outcome tuples, lexicographic in per-family outcome index."""
        return np.array(list(product(range(self.n), repeat=self.num_families)), dtype=np.int64)

    @cached_property
    def weights(self) -> np.ndarray:
        """``weights[l]`` is the concatenated eigenvalue vector w_lambda in operator order."""
        tuples = self.outcome_tuples()
        w = np.zeros((len(tuples), self.dim))
        for m, fam in enumerate(self.families):
            w[:, list(fam)] = self.eigentable[m][tuples[:, m]]
        return w

    def to_json(self) -> dict:
        return {
            "n": int(self.n),
            "name": self.name,
            "families": [list(f) for f in self.families],
            "ops": [matrix_to_json(op) for op in self.ops],
        }

    @classmethod
    def from_json(cls, data: dict) -> "OperatorBasis":
        n = int(data["n"])
        ops = np.array([matrix_from_json(m) for m in data["ops"]])
        return cls(n, ops, data["families"], data.get("name", "loaded"))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, indent=1)

    @classmethod
    def load(cls, path) -> "OperatorBasis":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def matrix_to_json(m) -> dict:
    m = np.asarray(m)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_json(d: dict) -> np.ndarray:
    re = np.asarray(d["re"], dtype=float)
    im = np.asarray(d.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != im.shape or re.ndim != 2:
        raise DimensionMismatch(f"inconsistent matrix shapes {re.shape} / {im.shape}")
    return re + 1j * im


# -- constructions ------------------------------------------------------------

def qutrit_builtin() -> OperatorBasis:
    """Fixed qutrit basis: eight operators in four commuting pairs, omega = e^{2 pi i/3}."""
    w = np.exp(2j * np.pi / 3)
    w2 = w * w
    s = 1 / np.sqrt(2)
    i = 1j
    ops = [
        np.sqrt(1.5) * np.diag([1, 0, -1]),
        s * np.diag([1, -2, 1]),
        s * np.array([[0, -i * w, i * w2], [i * w2, 0, -i * w], [-i * w, i * w2, 0]]),
        s * np.array([[0, -w, -w2], [-w2, 0, -w], [-w, -w2, 0]]),
        s * np.array([[0, -i, i * w2], [i, 0, -i * w2], [-i * w, i * w, 0]]),
        s * np.array([[0, -1, -w2], [-1, 0, -w2], [-w, -w, 0]]),
        s * np.array([[0, -i * w2, i * w2], [i * w, 0, -i], [-i * w, i, 0]]),
        s * np.array([[0, -w2, -w2], [-w, 0, -1], [-w, -1, 0]]),
    ]
    return OperatorBasis(3, np.array(ops), ((0, 1), (2, 3), (4, 5), (6, 7)), "qutrit-builtin")


def pauli_basis() -> OperatorBasis:
    sx = np.array([[0, 1], [1, 0]])
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.array([[1, 0], [0, -1]])
    return OperatorBasis(2, np.array([sx, sy, sz]), ((0,), (1,), (2,)), "pauli")


def gell_mann_basis() -> OperatorBasis:
    """Standard Gell-Mann matrices scaled to ``Tr(L_i L_j) = 3 delta_ij``.

    Each operator forms its own family; there is no commuting structure.
    """
    g = np.zeros((8, 3, 3), dtype=np.complex128)
    g[0][0, 1] = g[0][1, 0] = 1
    g[1][0, 1], g[1][1, 0] = -1j, 1j
    g[2][0, 0], g[2][1, 1] = 1, -1
    g[3][0, 2] = g[3][2, 0] = 1
    g[4][0, 2], g[4][2, 0] = -1j, 1j
    g[5][1, 2] = g[5][2, 1] = 1
    g[6][1, 2], g[6][2, 1] = -1j, 1j
    g[7] = np.diag([1, 1, -2]) / np.sqrt(3)
    return OperatorBasis(3, np.sqrt(1.5) * g, tuple((i,) for i in range(8)), "gell-mann")


def default_spectra(n: int) -> np.ndarray:
    """Weight vectors c^(j) (rows) with zero sum and ``c.c^T = n I``.

    For n = 3 this is the pair used by :func:`qutrit_builtin`; other
    dimensions orthogonalize the ramps (1,-1,0,..), (1,1,-2,0,..), ...
    """
    if n == 3:
        return np.array([np.sqrt(1.5) * np.array([1.0, 0.0, -1.0]),
                         np.array([1.0, -2.0, 1.0]) / np.sqrt(2)])
    rows = []
    for j in range(1, n):
        r = np.zeros(n)
        r[:j] = 1.0
        r[j] = -float(j)
        for prev in rows:
            r -= (r @ prev) / (prev @ prev) * prev
        rows.append(r)
    return np.array([r * np.sqrt(n / (r @ r)) for r in rows])


def from_mubs(m: MubFamily, spectra=None, name: str | None = None) -> OperatorBasis:
    """Operators ``sum_k c_k |e_k><e_k|`` for every basis of ``m`` and weight vector ``c``."""
    n = m.n
    c = default_spectra(n) if spectra is None else np.asarray(spectra, dtype=float)
    if c.shape != (n - 1, n):
        raise BadSpectra(f"expected {n - 1} weight vectors of length {n}, got {c.shape}")
    tol = DEFAULT.spectra
    if np.abs(c.sum(axis=1)).max() > tol:
        raise BadSpectra("weight vectors must sum to zero")
    if np.abs(c @ c.T - n * np.eye(n - 1)).max() > tol:
        raise BadSpectra("weight vectors must satisfy c_j . c_j' = n delta_jj'")
    ops, families = [], []
    for basis in m.bases:
        proj = np.einsum("ki,kj->kij", basis, basis.conj())
        start = len(ops)
        for row in c:
            ops.append(np.tensordot(row, proj, axes=1))
        families.append(tuple(range(start, len(ops))))
    return OperatorBasis(n, np.array(ops), tuple(families), name or f"mub-{n}")


def basis_for_dimension(n: int) -> OperatorBasis:
    """Pauli basis for n = 2, otherwise :func:`from_mubs` with the default spectra."""
    if n == 2:
        return pauli_basis()
    return from_mubs(build_mubs(n), default_spectra(n))


# -- validation ---------------------------------------------------------------

@dataclass(frozen=True)
class ValidationReport:
    n: int
    num_ops: int
    num_families: int
    hermiticity: float
    tracelessness: float
    orthonormality: float
    commutation: float
    unbiasedness: float
    eigentable: float
    reference_mismatch: float | None
    passed: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def validate(b: OperatorBasis, reference: OperatorBasis | None = None,
             atol: float = DEFAULT.basis_pass) -> ValidationReport:
    """Report worst-case deviations from every basis property.

    ``reference`` optionally supplies a basis to compare entry by entry; the
    mismatch is reported but does not affect ``passed``.
    """
    n, ops = b.n, b.ops
    herm = max(float(np.linalg.norm(a - a.conj().T)) for a in ops)
    trace = max(abs(complex(np.trace(a))) for a in ops)
    gram = np.einsum("aij,bji->ab", ops, ops)
    ortho = float(np.abs(gram - n * np.eye(len(ops))).max())
    comm = 0.0
    for fam in b.families:
        for i in fam:
            for j in fam:
                if i < j:
                    c = ops[i] @ ops[j] - ops[j] @ ops[i]
                    comm = max(comm, float(np.linalg.norm(c)))
    unb = 0.0
    vecs = b.eigvecs
    for x in range(len(vecs)):
        for y in range(x + 1, len(vecs)):
            ov = np.abs(vecs[x].conj().T @ vecs[y]) ** 2
            unb = max(unb, float(np.abs(ov - 1.0 / n).max()))
    table = 0.0
    for z in b.eigentable:
        table = max(table, float(np.abs(z.sum(axis=0)).max()),
                    float(np.abs(z.T @ z - n * np.eye(z.shape[1])).max()))
    mismatch = None
    if reference is not None:
        if reference.ops.shape != ops.shape:
            mismatch = float("inf")
        else:
            mismatch = float(np.abs(reference.ops - ops).max())
    size_ok = len(ops) == n * n - 1
    passed = size_ok and max(herm, trace, ortho, comm, unb, table) < atol
    return ValidationReport(n, len(ops), len(b.families), herm, trace, ortho, comm, unb,
                            table, mismatch, bool(passed))
