"""The classicality polytope in generalized Bloch space.

Half-space form: ``1 + <w_lambda, theta> >= 0`` for every outcome tuple
lambda, i.e. the region where the eta = 1 joint distribution is a genuine
probability distribution. Vertex form: the Bloch vectors of the MUB
eigenstates, or the output of double-description vertex enumeration.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._config import DEFAULT
from .errors import DimensionMismatch, NumericalDegeneracy, UnboundedRegion
from .io import write_csv
from .lp import linprog
from .operator_basis import OperatorBasis


@dataclass(frozen=True, eq=False)
class PolytopeH:
    normals: np.ndarray          # (K, N); faces are 1 + <w, theta> >= 0
    tuples: np.ndarray | None = None

    @property
    def num_faces(self) -> int:
        return len(self.normals)

    @property
    def dim(self) -> int:
        return self.normals.shape[1]


@dataclass(frozen=True, eq=False)
class PolytopeV:
    vertices: np.ndarray         # (V, N)
    labels: list = field(default_factory=list)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    def to_csv(self, path) -> None:
        dim = self.vertices.shape[1]
        labels = self.labels or [str(i) for i in range(len(self.vertices))]
        write_csv(path, ["label"] + [f"theta{i + 1}" for i in range(dim)],
                  ([lab, *v] for lab, v in zip(labels, self.vertices)))


# -- boundedness --------------------------------------------------------------

def recession_direction(normals) -> np.ndarray | None:
    """A nonzero ``d`` with ``W d >= 0`` if one exists, else ``None``.

    By Stiemke's alternative the recession cone is trivial exactly when
    ``W`` has full column rank and ``W^T y = 0`` for some ``y >= 1``; that
    feasibility LP is tried first. Only if it fails is a direction sought.
    """
    w = np.asarray(normals, dtype=float)
    k, dim = w.shape
    if np.linalg.matrix_rank(w, tol=DEFAULT.rank) < dim:
        _, _, vt = np.linalg.svd(w)
        return vt[-1]
    # y = 1 + s, s >= 0:  W^T s = -W^T 1
    res = linprog(np.zeros(k), a_eq=w.T, b_eq=-w.sum(axis=0))
    if res.status == "optimal":
        return None
    # maximize sum(W d) over the box |d_i| <= 1 subject to W d >= 0
    a_ub = np.vstack([-w, np.eye(dim), -np.eye(dim)])
    b_ub = np.concatenate([np.zeros(k), np.ones(2 * dim)])
    res = linprog(-w.sum(axis=0), a_ub, b_ub, free=True)
    return res.x


def h_polytope(b: OperatorBasis) -> PolytopeH:
    h = PolytopeH(b.weights.copy(), b.outcome_tuples())
    d = recession_direction(h.normals)
    if d is not None:
        raise UnboundedRegion(f"region is unbounded along {np.round(d, 6).tolist()}")
    return h


def mub_vertices(b: OperatorBasis) -> PolytopeV:
    """Bloch vectors ``theta_i = <v|a_i|v>`` of every MUB eigenstate."""
    verts, labels = [], []
    for m, vecs in enumerate(b.eigvecs):
        for k in range(b.n):
            v = vecs[:, k]
            verts.append(np.einsum("i,aij,j->a", v.conj(), b.ops, v).real)
            labels.append(f"{m}:{k}")
    return PolytopeV(np.array(verts), labels)


def membership(theta, h: PolytopeH) -> float:
    """Margin ``min_lambda (1 + <w_lambda, theta>)``; inside iff >= -1e-12."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (h.dim,):
        raise DimensionMismatch(f"theta has shape {theta.shape}, polytope lives in R^{h.dim}")
    return float((1.0 + h.normals @ theta).min())


def insphere_radius(h: PolytopeH) -> float:
    return float((1.0 / np.linalg.norm(h.normals, axis=1)).min())


def active_faces(h: PolytopeH, point, atol: float = DEFAULT.boundary) -> np.ndarray:
    return np.nonzero(np.abs(1.0 + h.normals @ np.asarray(point)) <= atol)[0]


# -- faces, centroids ------------------------------------------------------------

@dataclass(frozen=True)
class CentroidReport:
    insphere_radius: float
    centroid_norms: np.ndarray
    max_norm_deviation: float
    max_direction_deviation: float
    max_plane_residual: float
    faces_without_vertices: list
    vertices_per_face: np.ndarray
    passed: bool

    def to_json(self) -> dict:
        return {
            "insphere_radius": self.insphere_radius,
            "num_faces": len(self.centroid_norms),
            "max_norm_deviation": self.max_norm_deviation,
            "max_direction_deviation": self.max_direction_deviation,
            "max_plane_residual": self.max_plane_residual,
            "faces_without_vertices": len(self.faces_without_vertices),
            "vertices_per_face": sorted(set(int(x) for x in self.vertices_per_face)),
            "passed": self.passed,
        }


def face_vertex_incidence(h: PolytopeH, v: PolytopeV, atol: float = DEFAULT.boundary):
    slack = 1.0 + h.normals @ v.vertices.T                # (K, V)
    return [np.nonzero(np.abs(row) <= atol)[0] for row in slack]


def centroid_tangency(h: PolytopeH, v: PolytopeV, atol: float = DEFAULT.boundary) -> CentroidReport:
    """Check that every face centroid is the insphere's touching point."""
    r = insphere_radius(h)
    incidence = face_vertex_incidence(h, v, atol)
    norms = np.full(h.num_faces, np.nan)
    missing, dir_dev, plane = [], 0.0, 0.0
    for f, idx in enumerate(incidence):
        if len(idx) == 0:
            missing.append(f)
            continue
        c = v.vertices[idx].mean(axis=0)
        w = h.normals[f]
        norms[f] = np.linalg.norm(c)
        dir_dev = max(dir_dev, float(np.linalg.norm(c + w / (w @ w))))
        plane = max(plane, abs(1.0 + float(w @ c)))
    found = norms[~np.isnan(norms)]
    norm_dev = float(np.abs(found - r).max()) if len(found) else float("inf")
    counts = np.array([len(i) for i in incidence])
    passed = not missing and max(norm_dev, dir_dev, plane) < atol
    return CentroidReport(r, norms, norm_dev, dir_dev, plane, missing, counts, bool(passed))


def face_side_lengths(h: PolytopeH, v: PolytopeV, atol: float = DEFAULT.boundary) -> list:
    """Pairwise distances between the vertices of each face."""
    out = []
    for idx in face_vertex_incidence(h, v, atol):
        pts = v.vertices[idx]
        d = np.linalg.norm(pts[:, None] - pts[None, :], axis=2)
        out.append(d[np.triu_indices(len(pts), 1)])
    return out


# -- vertex enumeration (double description) -------------------------------------

def _independent_rows(a: np.ndarray, tol: float) -> list[int]:
    chosen: list[int] = []
    for i in range(len(a)):
        if np.linalg.matrix_rank(a[chosen + [i]], tol=tol) == len(chosen) + 1:
            chosen.append(i)
            if len(chosen) == a.shape[1]:
                break
    return chosen


def _dedup(points: np.ndarray, tol: float) -> np.ndarray:
    kept: list[np.ndarray] = []
    for p in points:
        if not any(np.linalg.norm(p - q) <= tol for q in kept):
            kept.append(p)
    return np.array(kept)


def _double_description(a: np.ndarray, zero_tol: float, rank_tol: float) -> np.ndarray:
    """Extreme rays of the pointed cone ``{x : A x >= 0}`` (rows of the result)."""
    d = a.shape[1]
    init = _independent_rows(a, rank_tol)
    if len(init) < d:
        raise UnboundedRegion("constraint matrix does not have full column rank")
    rays = np.linalg.inv(a[init]).T                       # rows are rays
    rays /= np.linalg.norm(rays, axis=1, keepdims=True)
    processed = list(init)
    zero = [sum(1 << j for j, r in enumerate(init) if j != i) for i in range(d)]
    # bit j of a mask refers to processed[j]
    for row_idx in [i for i in range(len(a)) if i not in set(init)]:
        s = rays @ a[row_idx]
        plus = np.nonzero(s > zero_tol)[0]
        minus = np.nonzero(s < -zero_tol)[0]
        nul = np.nonzero(np.abs(s) <= zero_tol)[0]
        bit = 1 << len(processed)
        new_rays, new_zero = [], []
        for p in plus:
            for q in minus:
                common = zero[p] & zero[q]
                if bin(common).count("1") < d - 2:
                    continue
                idx = [processed[j] for j in range(len(processed)) if common >> j & 1]
                if np.linalg.matrix_rank(a[idx], tol=rank_tol) < d - 2:
                    continue
                r = s[p] * rays[q] - s[q] * rays[p]
                new_rays.append(r / np.linalg.norm(r))
                new_zero.append(common | bit)
        keep = list(plus) + list(nul)
        zero = [zero[i] | (bit if i in set(nul) else 0) for i in keep] + new_zero
        rays = np.vstack([rays[keep]] + ([np.array(new_rays)] if new_rays else []))
        processed.append(row_idx)
    return rays


@dataclass(frozen=True, eq=False)
class VertexEnumeration:
    vertices: PolytopeV
    count: int
    mub_count: int
    mub_subset: bool        # every MUB vertex appears among the enumerated ones
    equal_to_mub: bool

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "mub_count": self.mub_count,
            "mub_subset": self.mub_subset,
            "equal_to_mub": self.equal_to_mub,
        }


def enumerate_vertices(h: PolytopeH, reference: PolytopeV | None = None,
                       dedup: float = DEFAULT.dedup, rank_tol: float = DEFAULT.rank) -> VertexEnumeration:
    """Vertices of a bounded H-polytope by floating-point double description.

    Works on the homogenized cone ``{(x0, theta): x0 + <w, theta> >= 0, x0 >= 0}``.
    Raises :class:`NumericalDegeneracy` if deduplication at ``dedup`` and at
    ``10 * dedup`` disagree.
    """
    if h.dim > 14:
        raise ValueError(f"vertex enumeration is limited to dimension <= 14, got {h.dim}")
    a = np.vstack([np.hstack([np.ones((h.num_faces, 1)), h.normals]),
                   np.eye(1, h.dim + 1)])
    rays = _double_description(a, zero_tol=1e-9, rank_tol=rank_tol)
    if np.any(rays[:, 0] <= 1e-12):
        raise UnboundedRegion("enumeration produced a ray at infinity")
    pts = rays[:, 1:] / rays[:, :1]
    fine, coarse = _dedup(pts, dedup), _dedup(pts, 10 * dedup)
    if len(fine) != len(coarse):
        raise NumericalDegeneracy(
            f"{len(fine)} vertices at tolerance {dedup}, {len(coarse)} at {10 * dedup}",
            clusterings=(fine, coarse))
    order = np.lexsort(np.round(fine, 9).T[::-1])
    verts = PolytopeV(fine[order])
    if reference is None:
        return VertexEnumeration(verts, len(fine), 0, False, False)
    found = [any(np.linalg.norm(r - v) <= dedup for v in fine) for r in reference.vertices]
    subset = all(found)
    return VertexEnumeration(verts, len(fine), reference.num_vertices, subset,
                             subset and len(fine) == reference.num_vertices)


def extreme_points(v: PolytopeV, tol: float = DEFAULT.lp) -> np.ndarray:
    """For each point, True if it is not a convex combination of the others (LP test)."""
    pts = v.vertices
    out = []
    for i in range(len(pts)):
        others = np.delete(pts, i, axis=0)
        a_eq = np.vstack([others.T, np.ones(len(others))])
        b_eq = np.concatenate([pts[i], [1.0]])
        res = linprog(np.zeros(len(others)), a_eq=a_eq, b_eq=b_eq, tol=tol)
        out.append(res.status == "infeasible")
    return np.array(out)


# -- edges -------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EdgeReport:
    count: int
    pairs: list
    gram: np.ndarray
    method: str = ("u ~ v iff the faces active at both span rank >= N-1 "
                   "and the midpoint lies on the boundary")

    def inner_product_histogram(self, decimals: int = 9) -> dict:
        g = np.round(self.gram, decimals)
        iu = np.triu_indices(len(g), 1)
        vals, counts = np.unique(g[iu], return_counts=True)
        return {float(x): int(c) for x, c in zip(vals, counts)}

    def edges_by_inner_product(self, decimals: int = 9) -> dict:
        vals = [round(float(self.gram[i, j]), decimals) for i, j in self.pairs]
        uniq, counts = np.unique(vals, return_counts=True)
        return {float(x): int(c) for x, c in zip(uniq, counts)}

    def partner_counts(self, value: float, atol: float = 1e-9) -> np.ndarray:
        g = self.gram.copy()
        np.fill_diagonal(g, np.nan)
        return np.sum(np.abs(g - value) <= atol, axis=1)

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "method": self.method,
            "vertex_pair_inner_products": self.inner_product_histogram(),
            "edge_inner_products": self.edges_by_inner_product(),
        }


def edge_adjacency(v: PolytopeV, h: PolytopeH, atol: float = DEFAULT.boundary,
                   rank_tol: float = DEFAULT.rank) -> EdgeReport:
    pts = v.vertices
    dim = h.dim
    active = [set(active_faces(h, p, atol).tolist()) for p in pts]
    pairs = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            common = sorted(active[i] & active[j])
            if len(common) < dim - 1:
                continue
            if np.linalg.matrix_rank(h.normals[common], tol=rank_tol) < dim - 1:
                continue
            if abs(membership(0.5 * (pts[i] + pts[j]), h)) > atol:
                continue
            pairs.append((i, j))
    return EdgeReport(len(pairs), pairs, pts @ pts.T)
