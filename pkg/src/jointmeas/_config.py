"""Numerical tolerances shared by every module.

All thresholds live in one frozen record so that reports can dump them and
the CLI can override them per run.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    # linalg kernel
    hermitian_check: float = 1e-8       # relative ||H - H^dag||_F before NonHermitian
    jacobi_offdiag: float = 1e-14       # relative off-diagonal Frobenius norm at convergence
    jacobi_max_sweeps: int = 100
    degenerate_eig: float = 1e-12       # eigenvalue ties for deterministic ordering
    # bases and states
    mub_pass: float = 1e-8
    spectra: float = 1e-10
    basis_pass: float = 1e-8
    physical: float = 1e-10             # min eigenvalue >= -physical
    # povm
    psd: float = 1e-10
    valid_prob: float = 1e-12
    clip_mass: float = 1e-9
    bisection: float = 1e-12
    # charfun
    bochner: float = 1e-9
    # geometry
    boundary: float = 1e-9
    dedup: float = 1e-7
    rank: float = 1e-8
    lp: float = 1e-9

    def as_dict(self) -> dict:
        return asdict(self)

    def override(self, **kwargs) -> "Tolerances":
        known = {f.name for f in fields(self)}
        unknown = set(kwargs) - known
        if unknown:
            raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
        return replace(self, **kwargs)


DEFAULT = Tolerances()
