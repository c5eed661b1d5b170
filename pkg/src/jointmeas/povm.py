"""Sharp and unsharp family measurements and their global joint POVM.

For family m with outcome tuples z_k the sharp projectors are
``P(z) = (I + sum_j z_j a_{m,j}) / n`` and the unsharp effects replace the
sum by ``eta`` times it. The global POVM over outcome tuples
``lambda = (z^(1), ..., z^(n+1))`` is

    G(lambda) = (I + eta * S_lambda) / n**(n+1),   S_lambda = sum_i w_lambda,i a_i,

whose marginal over every family but m is the unsharp effect set of m.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from ._config import DEFAULT, Tolerances
from .errors import DegenerateBasis, DimensionMismatch, EtaOutOfRange
from .io import outcome_label, write_csv
from .operator_basis import OperatorBasis


@dataclass(frozen=True, eq=False)
class EffectSet:
    family: int
    eta: float
    outcomes: np.ndarray   # (n, family size) eigenvalue tuples
    effects: np.ndarray    # (n, n, n)

    def total(self) -> np.ndarray:
        return self.effects.sum(axis=0)


@dataclass(frozen=True, eq=False)
class GlobalPovm:
    eta: float
    tuples: np.ndarray     # (K, n+1)
    elements: np.ndarray   # (K, n, n)
    min_eigs: np.ndarray   # (K,)
    basis: OperatorBasis
    psd_tol: float = DEFAULT.psd

    @property
    def psd(self) -> bool:
        return bool(self.min_eigs.min() >= -self.psd_tol)

    def completeness_error(self) -> float:
        return float(np.abs(self.elements.sum(axis=0) - np.eye(self.basis.n)).max())

    def to_json(self, include_elements: bool = False) -> dict:
        out = {
            "eta": self.eta,
            "num_elements": len(self.elements),
            "psd": self.psd,
            "min_eigenvalue": float(self.min_eigs.min()),
            "completeness_error": self.completeness_error(),
        }
        if include_elements:
            out["min_eigenvalue_per_element"] = {
                outcome_label(t): float(v) for t, v in zip(self.tuples, self.min_eigs)}
        return out


@dataclass(frozen=True, eq=False)
class JointDistribution:
    p: np.ndarray
    eta: float
    tuples: np.ndarray
    valid_tol: float = DEFAULT.valid_prob

    @property
    def valid(self) -> bool:
        return bool(self.p.min() >= -self.valid_tol)

    def marginal(self, family: int, n: int) -> np.ndarray:
        return np.bincount(self.tuples[:, family], weights=self.p, minlength=n)

    def to_csv(self, path) -> None:
        write_csv(path, [outcome_label(t) for t in self.tuples], [list(self.p)])


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise EtaOutOfRange(f"eta must lie in [0, 1], got {eta}")
    return eta


def _family_ops(b: OperatorBasis, m: int) -> np.ndarray:
    if not 0 <= m < b.num_families:
        raise IndexError(f"family {m} out of range for {b.num_families} families")
    return b.ops[list(b.families[m])]


def unsharp_effects(b: OperatorBasis, m: int, eta: float) -> EffectSet:
    eta = _check_eta(eta)
    ops = _family_ops(b, m)
    z = b.eigentable[m]
    effects = (np.eye(b.n) + eta * np.tensordot(z, ops, axes=1)) / b.n
    return EffectSet(m, eta, z, effects)


def sharp_projectors(b: OperatorBasis, m: int) -> EffectSet:
    return unsharp_effects(b, m, 1.0)


def face_operators(b: OperatorBasis) -> np.ndarray:
    """``S_lambda`` for every outcome tuple, shape ``(K, n, n)``."""
    return np.tensordot(b.weights, b.ops, axes=1)


def global_povm(b: OperatorBasis, eta: float, tol: Tolerances = DEFAULT) -> GlobalPovm:
    eta = _check_eta(eta)
    tuples = b.outcome_tuples()
    k = len(tuples)
    elements = (np.eye(b.n) + eta * face_operators(b)) / k
    return GlobalPovm(eta, tuples, elements, linalg.min_eigenvalues(elements, tol), b, tol.psd)


def marginalize(g: GlobalPovm, m: int) -> EffectSet:
    n = g.basis.n
    effects = np.zeros((n, n, n), dtype=np.complex128)
    np.add.at(effects, g.tuples[:, m], g.elements)
    return EffectSet(m, g.eta, g.basis.eigentable[m], effects)


@dataclass(frozen=True)
class CriticalEta:
    analytic: float
    bisection: float | None
    worst_min_eigenvalue: float   # min over lambda of min eig S_lambda
    worst_tuple: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "analytic": self.analytic,
            "bisection": self.bisection,
            "worst_face_min_eigenvalue": self.worst_min_eigenvalue,
            "worst_tuple": list(self.worst_tuple),
        }


def critical_eta(b: OperatorBasis, bisection: bool = True,
                 tol: Tolerances = DEFAULT) -> CriticalEta:
    """Largest eta for which every global POVM element is positive.

    The analytic value is ``1 / max_lambda(-min eig S_lambda)``. The optional
    bisection rebuilds ``G(lambda)`` at each trial eta and tests positivity
    with a zero threshold, so it shares no shortcut with the formula.
    """
    mins = linalg.min_eigenvalues(face_operators(b), tol)
    worst = int(np.argmin(mins))
    if mins[worst] >= 0:
        raise DegenerateBasis("every face operator is positive semidefinite")
    analytic = 1.0 / -mins[worst]
    bis = None
    if bisection:
        if global_povm(b, 1.0, tol).min_eigs.min() >= 0:
            bis = 1.0
        else:
            lo, hi = 0.0, 1.0
            while hi - lo > tol.bisection:
                mid = 0.5 * (lo + hi)
                if global_povm(b, mid, tol).min_eigs.min() >= 0:
                    lo = mid
                else:
                    hi = mid
            bis = 0.5 * (lo + hi)
    return CriticalEta(float(analytic), bis, float(mins[worst]),
                       tuple(int(x) for x in b.outcome_tuples()[worst]))


def joint_distribution(theta, b: OperatorBasis, eta: float) -> JointDistribution:
    """``p(lambda) = (1 + eta <w_lambda, theta>) / n**(n+1)``; signed values allowed."""
    eta = _check_eta(eta)
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (b.dim,):
        raise DimensionMismatch(f"theta has shape {theta.shape}, basis needs ({b.dim},)")
    w = b.weights
    return JointDistribution((1.0 + eta * (w @ theta)) / len(w), eta, b.outcome_tuples())


def distribution_from_state(rho, g: GlobalPovm) -> JointDistribution:
    """Born-rule probabilities ``Tr[rho G(lambda)]``."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != g.elements.shape[1:]:
        raise DimensionMismatch(f"state of shape {rho.shape} for elements {g.elements.shape[1:]}")
    p = np.einsum("ij,kji->k", rho, g.elements)
    return JointDistribution(p.real, g.eta, g.tuples)
