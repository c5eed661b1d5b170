"""Monte-Carlo simulation of the joint measurement."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._config import DEFAULT
from .errors import DimensionMismatch, InvalidDistribution
from .io import outcome_label, write_csv
from .povm import JointDistribution
from .states import make_rng

# 99.9% quantiles of chi^2 for small degrees of freedom
_CHI2_999 = {
    1: 10.8276, 2: 13.8155, 3: 16.2662, 4: 18.4668, 5: 20.5150,
    6: 22.4577, 7: 24.3219, 8: 26.1245, 9: 27.8772, 10: 29.5883,
    11: 31.2641, 12: 32.9095, 13: 34.5282, 14: 36.1233, 15: 37.6973,
    20: 45.3147, 26: 54.0520, 80: 124.8392, 1023: 1168.4972,
}
_Z_999 = 3.090232306167813


def chi2_quantile_999(df: int) -> float:
    """99.9% chi-square quantile; tabulated, else Wilson-Hilferty."""
    if df < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if df in _CHI2_999:
        return _CHI2_999[df]
    h = 2.0 / (9.0 * df)
    return df * (1.0 - h + _Z_999 * math.sqrt(h)) ** 3


@dataclass(frozen=True, eq=False)
class OutcomeCounts:
    counts: np.ndarray
    total: int
    seed: int
    tuples: np.ndarray | None = None

    def frequencies(self) -> np.ndarray:
        return self.counts / self.total


def merge_counts(*parts: OutcomeCounts) -> OutcomeCounts:
    counts = sum(p.counts for p in parts)
    return OutcomeCounts(counts, int(sum(p.total for p in parts)), parts[0].seed, parts[0].tuples)


def _sanitize(p: np.ndarray, tol: float) -> np.ndarray:
    neg = -p[p < 0].sum()
    if neg > tol:
        raise InvalidDistribution(f"negative mass {neg:.3e} exceeds {tol:.1e}")
    q = np.clip(p, 0.0, None)
    return q / q.sum()


def _draw(cdf: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    idx = np.searchsorted(cdf, rng.random(shots), side="right")
    return np.bincount(np.minimum(idx, len(cdf) - 1), minlength=len(cdf))


def sample(p: JointDistribution | np.ndarray, n_shots: int, seed: int = 0,
           workers: int = 1) -> OutcomeCounts:
    """Inverse-CDF multinomial draw over outcomes in lexicographic order.

    With ``workers > 1`` the shots are split into contiguous chunks, each
    drawn from a generator keyed by ``(seed, worker)``; the merged counts
    depend on ``workers`` but not on scheduling.
    """
    tuples = p.tuples if isinstance(p, JointDistribution) else None
    probs = _sanitize(np.asarray(p.p if tuples is not None else p, dtype=float),
                      DEFAULT.clip_mass)
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    if workers <= 1:
        return OutcomeCounts(_draw(cdf, n_shots, make_rng(seed)), n_shots, seed, tuples)
    base, extra = divmod(n_shots, workers)
    parts = []
    for w in range(workers):
        shots = base + (1 if w < extra else 0)
        key = int(np.random.SeedSequence([seed, w]).generate_state(1, np.uint64)[0])
        parts.append(OutcomeCounts(_draw(cdf, shots, make_rng(key)), shots, seed, tuples))
    return merge_counts(*parts)


@dataclass(frozen=True)
class FitResult:
    chi2: float
    df: int
    quantile_999: float
    tv: float

    @property
    def rejected(self) -> bool:
        return self.chi2 > self.quantile_999


def goodness_of_fit(c: OutcomeCounts, p: JointDistribution | np.ndarray) -> FitResult:
    """Pearson chi-square (cells with expected count < 5 pooled) and TV distance."""
    probs = np.asarray(p.p if isinstance(p, JointDistribution) else p, dtype=float)
    if probs.shape != c.counts.shape:
        raise DimensionMismatch("counts and distribution cover different outcome spaces")
    probs = np.clip(probs, 0.0, None)
    expected = probs * c.total
    big = expected >= 5
    obs = list(c.counts[big].astype(float))
    exp = list(expected[big])
    if (~big).any():
        obs.append(float(c.counts[~big].sum()))
        exp.append(float(expected[~big].sum()))
    obs, exp = np.array(obs), np.array(exp)
    nz = exp > 0
    chi2 = float(((obs[nz] - exp[nz]) ** 2 / exp[nz]).sum())
    df = max(int(nz.sum()) - 1, 1)
    tv = 0.5 * float(np.abs(c.frequencies() - probs).sum())
    return FitResult(chi2, df, chi2_quantile_999(df), tv)


def counts_to_csv(c: OutcomeCounts, p: JointDistribution, path) -> None:
    freq = c.frequencies()
    rows = ([outcome_label(t), float(q), float(f), float(f - q)]
            for t, q, f in zip(p.tuples, p.p, freq))
    write_csv(path, ["outcome", "analytic_p", "empirical_frequency", "deviation"], rows)
