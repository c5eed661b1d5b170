"""Margenau-Hill quantum characteristic functions and their classical twins.

With ``A_m(t) = sum_{i in family m} t_i a_i`` the Margenau-Hill function
averages ``Tr[rho e^{iA_a} e^{iA_b} ...]`` over all orderings of the
families. The classical characteristic function of a (possibly signed) joint
distribution is the finite sum ``sum_lambda p(lambda) exp(i <t, w_lambda>)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from . import linalg
from ._config import DEFAULT
from .errors import DimensionMismatch, NoDiagonalizingConvention
from .io import write_csv
from .operator_basis import OperatorBasis
from .povm import JointDistribution, joint_distribution
from .states import bloch_from_density, make_rng


def _check_t(t, b: OperatorBasis) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if t.shape[-1] != b.dim:
        raise DimensionMismatch(f"t has {t.shape[-1]} components, basis needs {b.dim}")
    if not np.all(np.isfinite(t)):
        raise ValueError("t has non-finite components")
    return t


def family_exponentials(b: OperatorBasis, t) -> list[np.ndarray]:
    """``exp(i A_m(t))`` for every family, via Hermitian eigendecomposition."""
    t = _check_t(t, b)
    out = []
    for fam in b.families:
        a = np.tensordot(t[list(fam)], b.ops[list(fam)], axes=1)
        out.append(linalg.unitary_exp(a, 1.0))
    return out


def _ordered_sum(us: list[np.ndarray]) -> np.ndarray:
    # sum over all orderings of the product, by first factor: T(S) = sum_m U_m T(S - m)
    n = us[0].shape[0]
    f = len(us)
    memo = {0: np.eye(n, dtype=np.complex128)}
    for mask in range(1, 1 << f):
        acc = np.zeros((n, n), dtype=np.complex128)
        for m in range(f):
            if mask >> m & 1:
                acc += us[m] @ memo[mask & ~(1 << m)]
        memo[mask] = acc
    return memo[(1 << f) - 1]


def mh_charfun(rho, b: OperatorBasis, t, orderings=None) -> complex:
    """Margenau-Hill characteristic function of ``rho`` at ``t``.

    ``orderings`` optionally lists the family permutations to sum explicitly
    (it must contain every permutation once); by default the symmetrized
    operator is accumulated over subsets, which is the same sum.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (b.n, b.n):
        raise DimensionMismatch(f"state of shape {rho.shape} for dimension {b.n}")
    us = family_exponentials(b, t)
    f = len(us)
    if orderings is None:
        sym = _ordered_sum(us)
    else:
        orderings = [tuple(p) for p in orderings]
        if sorted(orderings) != sorted(permutations(range(f))):
            raise ValueError("orderings must contain each permutation of the families once")
        sym = np.zeros_like(rho)
        for perm in orderings:
            prod = np.eye(b.n, dtype=np.complex128)
            for m in perm:
                prod = prod @ us[m]
            sym += prod
    return complex(np.trace(rho @ sym) / math.factorial(f))


def classical_charfun(p: JointDistribution | np.ndarray, b: OperatorBasis, t):
    """``sum_lambda p(lambda) exp(i <t, w_lambda>)``; ``t`` may be ``(N,)`` or ``(M, N)``."""
    probs = p.p if isinstance(p, JointDistribution) else np.asarray(p, dtype=float)
    w = b.weights
    if probs.shape != (len(w),):
        raise DimensionMismatch(f"distribution has {probs.shape} entries, basis has {len(w)} tuples")
    t = _check_t(t, b)
    phase = np.exp(1j * (t @ w.T))
    return phase @ probs


def random_tgrid(dim: int, size: int = 50, seed: int = 0) -> np.ndarray:
    """Uniform draws from ``[-pi, pi]`` per component."""
    return make_rng(seed).uniform(-np.pi, np.pi, size=(size, dim))


@dataclass(frozen=True)
class CoincidenceReport:
    num_points: int
    max_deviation: float
    quantum: np.ndarray
    classical: np.ndarray
    grid: np.ndarray

    def rows(self):
        for t, q, c in zip(self.grid, self.quantum, self.classical):
            yield [*t, q.real, q.imag, c.real, c.imag]

    def to_csv(self, path) -> None:
        dim = self.grid.shape[1]
        header = [f"t{i + 1}" for i in range(dim)] + [
            "re_phi_mh", "im_phi_mh", "re_phi_classical", "im_phi_classical"]
        write_csv(path, header, self.rows())


def coincidence_scan(rho, b: OperatorBasis, grid) -> CoincidenceReport:
    """Compare the Margenau-Hill function with the classical function of the eta = 1 distribution."""
    grid = np.atleast_2d(_check_t(grid, b))
    if len(grid) == 0:
        raise ValueError("grid must be nonempty")
    dist = joint_distribution(bloch_from_density(rho, b), b, 1.0)
    q = np.array([mh_charfun(rho, b, t) for t in grid])
    c = classical_charfun(dist, b, grid)
    return CoincidenceReport(len(grid), float(np.abs(q - c).max()), q, c, grid)


# -- Bochner positivity ---------------------------------------------------------

def bochner_gram(phi, tpoints, vectorized: bool = False) -> np.ndarray:
    tpoints = np.atleast_2d(np.asarray(tpoints, dtype=float))
    r = len(tpoints)
    if not 1 <= r <= 16:
        raise ValueError(f"need between 1 and 16 points, got {r}")
    diffs = (tpoints[:, None, :] - tpoints[None, :, :]).reshape(r * r, -1)
    if vectorized:
        vals = np.asarray(phi(diffs), dtype=np.complex128)
    else:
        vals = np.array([phi(d) for d in diffs], dtype=np.complex128)
    return vals.reshape(r, r)


def bochner_check(phi, tpoints, vectorized: bool = False) -> float:
    """Smallest eigenvalue of the Hermitized Gram matrix ``phi(t_i - t_j)``."""
    g = bochner_gram(phi, tpoints, vectorized)
    return linalg.min_eigenvalue(0.5 * (g + g.conj().T))


@dataclass(frozen=True)
class BochnerSearch:
    best_min_eigenvalue: float
    best_points: np.ndarray
    num_sets: int
    violation: bool

    def to_json(self) -> dict:
        return {
            "best_min_eigenvalue": self.best_min_eigenvalue,
            "num_sets": self.num_sets,
            "violation": self.violation,
            "best_points": self.best_points.tolist(),
        }


def bochner_search(phi, dim: int, seed: int = 0, num_sets: int = 10_000,
                   sizes=(4, 8), scales=(0.5, 1.0, 2.0), vectorized: bool = False,
                   stop_on_violation: bool = False,
                   threshold: float = DEFAULT.bochner) -> BochnerSearch:
    """Random search for a point set whose Gram matrix is not positive.

    Points are Gaussian with a per-set scale. The first tenth of the budget
    cycles through ``scales``; afterwards the scale that produced the lowest
    eigenvalue so far is used for every other set.
    """
    rng = make_rng(seed)
    warmup = max(len(scales), num_sets // 10)
    per_scale = {s: np.inf for s in scales}
    best, best_pts = np.inf, None
    for i in range(num_sets):
        if i < warmup or i % 2:
            scale = scales[i % len(scales)]
        else:
            scale = min(per_scale, key=per_scale.get)
        r = sizes[i % len(sizes)]
        pts = scale * rng.normal(size=(r, dim))
        val = bochner_check(phi, pts, vectorized)
        per_scale[scale] = min(per_scale[scale], val)
        if val < best:
            best, best_pts = val, pts
        if stop_on_violation and best < -threshold:
            return BochnerSearch(float(best), best_pts, i + 1, True)
    return BochnerSearch(float(best), best_pts, num_sets, bool(best < -threshold))


# -- diagonalizing unitaries for the qutrit basis -----------------------------

def qutrit_diagonalizers() -> dict[int, np.ndarray]:
    """``U_j = M_j / sqrt(3)`` diagonalizing qutrit families j = 2, 3, 4."""
    w = np.exp(2j * np.pi / 3)
    w2 = w * w
    ms = {
        2: [[1, 1, 1], [1, w, w2], [1, w2, w]],
        3: [[1, w2, 1], [1, 1, w2], [1, w, w]],
        4: [[1, w, 1], [1, w2, w2], [1, 1, w]],
    }
    return {j: np.array(m, dtype=np.complex128) / np.sqrt(3) for j, m in ms.items()}


def _offdiag(x: np.ndarray) -> float:
    return float(np.linalg.norm(x - np.diag(np.diag(x))))


@dataclass(frozen=True)
class DiagonalizerReport:
    unitarity: dict
    a1_offdiag: float
    convention: str
    offdiag: dict          # convention -> worst off-diagonal norm per family
    num_samples: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def diagonalizer_check(b: OperatorBasis, num_samples: int = 20, seed: int = 0,
                       atol: float = 1e-9) -> DiagonalizerReport:
    """Check which conjugation by ``U_j`` diagonalizes ``A_j(t)`` for the qutrit basis."""
    if b.n != 3 or b.num_families != 4:
        raise DimensionMismatch("diagonalizer check applies to the qutrit basis only")
    us = qutrit_diagonalizers()
    unit = {j: float(np.linalg.norm(u.conj().T @ u - np.eye(3))) for j, u in us.items()}
    tgrid = make_rng(seed).normal(size=(num_samples, b.dim))
    conventions = {
        "U^dag A U": lambda u, a: u.conj().T @ a @ u,
        "U A U^dag": lambda u, a: u @ a @ u.conj().T,
    }
    worst = {name: {j: 0.0 for j in us} for name in conventions}
    a1 = 0.0
    for t in tgrid:
        amats = [np.tensordot(t[list(f)], b.ops[list(f)], axes=1) for f in b.families]
        a1 = max(a1, _offdiag(amats[0]))
        for name, conj in conventions.items():
            for j, u in us.items():
                worst[name][j] = max(worst[name][j], _offdiag(conj(u, amats[j - 1])))
    ok = [name for name in conventions if max(worst[name].values()) < atol]
    if not ok:
        raise NoDiagonalizingConvention(f"no convention diagonalizes all families: {worst}")
    return DiagonalizerReport(unit, a1, ok[0], worst, num_samples)
