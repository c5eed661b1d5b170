"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Intended for the small feasibility and boundedness problems of the
geometry module (at most a few thousand rows), not as a general solver.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LPResult:
    status: str            # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    fun: float | None
    iterations: int


class _Unbounded(Exception):
    pass


def _pivot(t: np.ndarray, row: int, col: int) -> None:
    t[row] /= t[row, col]
    factor = t[:, col].copy()
    factor[row] = 0.0
    t -= np.outer(factor, t[row])


def _run(t, basis, allowed, tol, max_iter):
    m = t.shape[0] - 1
    it = 0
    while True:
        reduced = t[m, allowed]
        neg = np.nonzero(reduced < -tol)[0]
        if len(neg) == 0:
            return it
        col = int(allowed[neg[0]])                      # Bland: lowest index enters
        column = t[:m, col]
        pos = np.nonzero(column > tol)[0]
        if len(pos) == 0:
            raise _Unbounded(col)
        ratios = t[pos, -1] / column[pos]
        best = ratios.min()
        ties = pos[ratios <= best + tol * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))    # Bland: lowest basic index leaves
        _pivot(t, row, col)
        basis[row] = col
        it += 1
        if it > max_iter:
            raise RuntimeError("simplex iteration limit reached")


def simplex_standard(c, a_eq, b_eq, tol: float = 1e-9, max_iter: int = 50_000) -> LPResult:
    """Minimize ``c.x`` subject to ``A x = b`` and ``x >= 0``."""
    a = np.array(a_eq, dtype=float, ndmin=2)
    b = np.array(b_eq, dtype=float).ravel()
    c = np.array(c, dtype=float).ravel()
    m, n = a.shape
    neg = b < 0
    a[neg] *= -1
    b[neg] *= -1
    t = np.zeros((m + 1, n + m + 1))
    t[:m, :n] = a
    t[:m, n:n + m] = np.eye(m)
    t[:m, -1] = b
    t[m, n:n + m] = 1.0
    t[m] -= t[:m].sum(axis=0)
    basis = list(range(n, n + m))
    it = _run(t, basis, np.arange(n + m), tol, max_iter)
    if -t[m, -1] > tol * max(1.0, float(np.abs(b).max(initial=0.0))):
        return LPResult("infeasible", None, None, it)
    # drive remaining artificials out of the basis; drop redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= n:
            cand = np.nonzero(np.abs(t[r, :n]) > tol)[0]
            if len(cand):
                _pivot(t, r, int(cand[0]))
                basis[r] = int(cand[0])
                keep.append(r)
        else:
            keep.append(r)
    t = np.vstack([t[keep], t[m:m + 1]])
    basis = [basis[r] for r in keep]
    m = len(keep)
    t[m, :] = 0.0
    t[m, :n] = c
    for r, j in enumerate(basis):
        t[m] -= c[j] * t[r]
    try:
        it += _run(t, basis, np.arange(n), tol, max_iter)
    except _Unbounded:
        return LPResult("unbounded", None, None, it)
    x = np.zeros(n + len(b))
    for r, j in enumerate(basis):
        x[j] = t[r, -1]
    x = x[:n]
    return LPResult("optimal", x, float(c @ x), it)


def linprog(c, a_ub=None, b_ub=None, a_eq=None, b_eq=None, free: bool = False,
            tol: float = 1e-9) -> LPResult:
    """Minimize ``c.x`` with optional ``A_ub x <= b_ub`` and ``A_eq x = b_eq``.

    Variables are nonnegative unless ``free`` is set, in which case each is
    split into a difference of two nonnegative parts.
    """
    c = np.asarray(c, dtype=float).ravel()
    nv = len(c)
    blocks_a, blocks_b = [], []
    n_ub = 0
    if a_ub is not None:
        a_ub = np.array(a_ub, dtype=float, ndmin=2)
        n_ub = a_ub.shape[0]
    width = (2 * nv if free else nv) + n_ub

    def expand(mat):
        return np.hstack([mat, -mat]) if free else mat

    if a_ub is not None:
        row = np.zeros((n_ub, width))
        row[:, : (2 * nv if free else nv)] = expand(a_ub)
        row[:, (2 * nv if free else nv):] = np.eye(n_ub)
        blocks_a.append(row)
        blocks_b.append(np.asarray(b_ub, dtype=float).ravel())
    if a_eq is not None:
        a_eq = np.array(a_eq, dtype=float, ndmin=2)
        row = np.zeros((a_eq.shape[0], width))
        row[:, : (2 * nv if free else nv)] = expand(a_eq)
        blocks_a.append(row)
        blocks_b.append(np.asarray(b_eq, dtype=float).ravel())
    if not blocks_a:
        raise ValueError("at least one constraint block is required")
    cc = np.zeros(width)
    cc[: (2 * nv if free else nv)] = np.concatenate([c, -c]) if free else c
    res = simplex_standard(cc, np.vstack(blocks_a), np.concatenate(blocks_b), tol)
    if res.status != "optimal":
        return res
    x = res.x[:2 * nv] if free else res.x[:nv]
    if free:
        x = x[:nv] - x[nv:]
    return LPResult("optimal", x, float(c @ x), res.iterations)
