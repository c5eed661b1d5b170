"""Acceptance checks, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line with the measured numbers
(collected again in the terminal summary) and then asserts the criterion at its stated
tolerance.
"""
import itertools

import numpy as np
import pytest

from jointmeas.charfun import (bochner_check, bochner_search, classical_charfun,
                               diagonalizer_check, mh_charfun, qutrit_diagonalizers,
                               random_tgrid)
from jointmeas.cli import main as cli_main
from jointmeas.geometry import (centroid_tangency, edge_adjacency, enumerate_vertices,
                                face_side_lengths, h_polytope, insphere_radius, membership,
                                mub_vertices)
from jointmeas.operator_basis import (basis_for_dimension, gell_mann_basis, pauli_basis,
                                      qutrit_builtin, validate)
from jointmeas.povm import (critical_eta, distribution_from_state, global_povm,
                            joint_distribution, marginalize, sharp_projectors,
                            unsharp_effects)
from jointmeas.sampler import goodness_of_fit, sample
from jointmeas.states import bloch_from_density, density_from_bloch, random_state

from conftest import ACCEPTANCE_LINES


def report(num, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  [{num:2d}] {title}: {detail}"
    ACCEPTANCE_LINES.append((num, line))
    print("\n" + line)
    assert ok, f"criterion {num} ({title}) failed: {detail}"


def test_01_qubit_threshold():
    c = critical_eta(pauli_basis())
    target = 1 / np.sqrt(3)
    ok = abs(c.analytic - target) < 1e-9 and abs(c.bisection - c.analytic) < 1e-10
    report(1, "qubit threshold", ok,
           f"analytic {c.analytic:.12f}, bisection {c.bisection:.12f}, target {target:.12f}")


def test_02_qutrit_threshold():
    b = qutrit_builtin()
    c = critical_eta(b)
    target = 1 / np.sqrt(8)
    at = global_povm(b, target)
    above = global_povm(b, 1.01 * target)
    ok = (abs(c.analytic - target) < 1e-9 and at.psd and above.min_eigs.min() < 0)
    report(2, "qutrit threshold", ok,
           f"analytic {c.analytic:.12f} (bisection {c.bisection:.12f}) vs target {target:.12f}; "
           f"min eig of G at target {at.min_eigs.min():.3e}, "
           f"{int((at.min_eigs < -at.psd_tol).sum())} of 81 elements negative")


def test_03_higher_thresholds():
    c4 = critical_eta(basis_for_dimension(4))
    c5 = critical_eta(basis_for_dimension(5), bisection=False)
    t4, t5 = 1 / np.sqrt(15), 1 / np.sqrt(24)
    ok = abs(c4.analytic - t4) < 1e-6 and abs(c5.analytic - t5) < 1e-6
    report(3, "n=4 and n=5 thresholds", ok,
           f"n=4: {c4.analytic:.10f} (bisection {c4.bisection:.10f}) vs {t4:.10f}; "
           f"n=5: {c5.analytic:.10f} vs {t5:.10f}")


def test_04_basis_validation():
    rep = validate(qutrit_builtin(), atol=1e-9)
    worst = max(rep.hermiticity, rep.tracelessness, rep.orthonormality, rep.commutation,
                rep.unbiasedness)
    report(4, "qutrit basis validation", rep.passed and worst < 1e-9, f"worst deviation {worst:.2e}")


def test_05_marginalization():
    b = qutrit_builtin()
    worst = 0.0
    for eta in (0.0, 0.2, 1 / np.sqrt(8), 1.0):
        g = global_povm(b, eta)
        for m in range(b.num_families):
            diff = marginalize(g, m).effects - unsharp_effects(b, m, eta).effects
            worst = max(worst, float(np.abs(diff).max()))
    idem = max(float(np.abs(p @ p - p).max())
               for m in range(b.num_families) for p in sharp_projectors(b, m).effects)
    gm = gell_mann_basis()
    e = marginalize(global_povm(gm, 1.0), 0).effects
    _, v = np.linalg.eigh(gm.ops[0])
    projs = [np.outer(v[:, j], v[:, j].conj()) for j in range(3)]
    gm_dist = max(min(np.linalg.norm(ek - p) for p in projs) for ek in e)
    ok = worst < 1e-10 and idem < 1e-9 and gm_dist > 0.1
    report(5, "marginalization", ok,
           f"marginal error {worst:.2e}, idempotency {idem:.2e}, Gell-Mann distance {gm_dist:.3f}")


def test_06_distribution_consistency():
    worst = 0.0
    for b in (pauli_basis(), qutrit_builtin()):
        g = global_povm(b, 0.2)
        for seed in range(100):
            rho = random_state(b.n, "mixed", seed)
            a = distribution_from_state(rho, g).p
            c = joint_distribution(bloch_from_density(rho, b), b, 0.2).p
            worst = max(worst, float(np.abs(a - c).max()))
    uni = joint_distribution(np.zeros(8), qutrit_builtin(), 1.0).p
    uni_err = float(np.abs(uni - 1 / 81).max())
    ok = worst < 1e-12 and uni_err < 1e-15
    report(6, "distribution consistency", ok, f"trace vs Bloch {worst:.2e}, uniform {uni_err:.2e}")


def _coincidence(b, n_states, n_t, seed0):
    worst = 0.0
    for s in range(n_states):
        rho = random_state(b.n, "mixed", seed0 + s)
        d = joint_distribution(bloch_from_density(rho, b), b, 1.0)
        grid = random_tgrid(b.dim, n_t, seed0 + s)
        q = np.array([mh_charfun(rho, b, t) for t in grid])
        worst = max(worst, float(np.abs(q - classical_charfun(d, b, grid)).max()))
    return worst


def test_07_charfun_coincidence():
    qubit = _coincidence(pauli_basis(), 200, 1, 0)
    qutrit = _coincidence(qutrit_builtin(), 100, 50, 1000)
    ok = qubit < 1e-9 and qutrit < 1e-9
    report(7, "characteristic-function coincidence", ok,
           f"qubit max deviation {qubit:.2e} (200 pairs), qutrit {qutrit:.3e} (100x50 pairs)")


def test_08_bochner():
    b = qutrit_builtin()
    rng = np.random.default_rng(8)
    worst_valid = np.inf
    for k in range(100):
        rho = random_state(3, "pure" if k % 2 else "mixed", k)
        d = joint_distribution(bloch_from_density(rho, b), b, 0.25)
        phi = lambda t, d=d: classical_charfun(d, b, t)
        worst_valid = min(worst_valid, bochner_check(phi, rng.normal(size=(8, 8)), vectorized=True))
    h = h_polytope(b)
    found = None
    for seed in range(50):
        theta = bloch_from_density(random_state(3, "pure", seed), b)
        margin = membership(theta, h)
        if margin >= -0.3:
            continue
        d = joint_distribution(theta, b, 1.0)
        res = bochner_search(lambda t: classical_charfun(d, b, t), 8, seed=seed, num_sets=10_000,
                             vectorized=True, stop_on_violation=True)
        if res.violation:
            found = (seed, margin, res)
            break
    ok = worst_valid >= -1e-9 and found is not None
    detail = f"valid min eig {worst_valid:.2e}"
    if found:
        detail += (f"; violation {found[2].best_min_eigenvalue:.3f} for state seed {found[0]} "
                   f"(margin {found[1]:.3f}) after {found[2].num_sets} sets")
    report(8, "Bochner positivity", ok, detail)


def test_09_qubit_geometry():
    b = pauli_basis()
    h = h_polytope(b)
    v = mub_vertices(b)
    expected = {tuple(r) for r in np.vstack([np.eye(3), -np.eye(3)])}
    match = {tuple(r) for r in np.round(v.vertices, 12) + 0.0} == expected
    edges = edge_adjacency(v, h).count
    cent = centroid_tangency(h, v)
    sides = np.concatenate(face_side_lengths(h, v))
    r = insphere_radius(h)
    ok = (h.num_faces == 8 and match and edges == 12 and abs(r - 1 / np.sqrt(3)) < 1e-9
          and cent.passed and cent.max_norm_deviation < 1e-9 and np.abs(sides - np.sqrt(2)).max() < 1e-9)
    report(9, "qubit geometry", ok,
           f"{h.num_faces} faces, {v.num_vertices} vertices, {edges} edges, insphere {r:.12f}")


def test_10_qutrit_geometry():
    b = qutrit_builtin()
    h = h_polytope(b)
    v = mub_vertices(b)
    wnorm = np.abs((h.normals ** 2).sum(axis=1) - 8).max()
    on_boundary = max(abs(membership(p, h)) for p in v.vertices)
    purity = max(np.abs(r @ r - r).max() for r, _ in (density_from_bloch(p, b) for p in v.vertices))
    vnorm = np.abs((v.vertices ** 2).sum(axis=1) - 2).max()
    edges = edge_adjacency(v, h)
    gram_ok = (np.all(edges.partner_counts(-1.0) == 2) and np.all(edges.partner_counts(0.0) == 9))
    r = insphere_radius(h)
    cent = centroid_tangency(h, v)
    enum = enumerate_vertices(h, v)
    ok = (h.num_faces == 81 and wnorm < 1e-9 and on_boundary < 1e-9 and purity < 1e-9
          and vnorm < 1e-9 and gram_ok and abs(r - 1 / np.sqrt(8)) < 1e-9 and cent.passed)
    split = edges.edges_by_inner_product()
    report(10, "qutrit geometry", ok,
           f"81 faces, insphere {r:.12f}; enumeration {enum.count} vertices (reference 12, "
           f"{'confirmed' if enum.count == 12 else 'discrepancy'}); {edges.count} edges "
           f"(reference 54, {'confirmed' if edges.count == 54 else 'discrepancy'}: "
           f"{split.get(0.0, 0)} orthogonal pairs, {split.get(-1.0, 0)} within-family pairs)")


def test_11_ququart_geometry():
    b = basis_for_dimension(4)
    h = h_polytope(b)
    v = mub_vertices(b)
    on_boundary = max(abs(membership(p, h)) for p in v.vertices)
    r = insphere_radius(h)
    edges = edge_adjacency(v, h)
    ok = (h.num_faces == 1024 and v.num_vertices == 20 and on_boundary < 1e-9
          and abs(r - 1 / np.sqrt(15)) < 1e-6)
    split = edges.edges_by_inner_product()
    report(11, "n=4 geometry", ok,
           f"1024 faces, 20 vertices, insphere {r:.10f}; {edges.count} edges (reference 160, "
           f"{'confirmed' if edges.count == 160 else 'discrepancy'}: inner products {split})")


def test_12_sampling():
    b = qutrit_builtin()
    d = joint_distribution(np.zeros(8), b, 1.0)
    rho = np.eye(3) / 3
    tvs, chis, marg = [], [], 0.0
    for seed in range(5):
        c = sample(d, 100_000, seed)
        fit = goodness_of_fit(c, d)
        tvs.append(fit.tv)
        chis.append(fit.chi2 < fit.quantile_999)
        for m in range(b.num_families):
            emp = np.bincount(d.tuples[:, m], weights=c.counts, minlength=3) / c.total
            ana = np.einsum("ij,kji->k", rho, unsharp_effects(b, m, 1.0).effects).real
            marg = max(marg, 0.5 * float(np.abs(emp - ana).sum()))
    ok = max(tvs) < 0.01 and all(chis) and marg < 0.02
    report(12, "sampling", ok,
           f"tv per seed {[round(t, 5) for t in tvs]}, chi2 below 99.9% quantile {all(chis)}, "
           f"marginal tv {marg:.4f}")


def test_13_diagonalizers():
    b = qutrit_builtin()
    unit = max(np.abs(u.conj().T @ u - np.eye(3)).max() for u in qutrit_diagonalizers().values())
    rep = diagonalizer_check(b, num_samples=20, seed=13)
    worst = max(rep.offdiag[rep.convention].values())
    ok = unit < 1e-12 and worst < 1e-9 and rep.a1_offdiag == 0.0
    report(13, "diagonalizers", ok,
           f"unitarity {unit:.1e}, convention {rep.convention}, off-diagonal {worst:.1e}")


def test_14_determinism(tmp_path):
    codes = [cli_main(["suite", "--out", str(tmp_path / r), "--seed", "7"]) for r in ("a", "b")]
    files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*") if p.is_file())
    other = sorted(p.relative_to(tmp_path / "b") for p in (tmp_path / "b").rglob("*") if p.is_file())
    same = files == other and all(
        (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes() for f in files)
    report(14, "determinism", same and codes == [0, 0],
           f"{len(files)} files compared, exit codes {codes}")
