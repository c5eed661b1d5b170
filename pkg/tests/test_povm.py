import itertools

import numpy as np
import pytest

from jointmeas.errors import DegenerateBasis, EtaOutOfRange
from jointmeas.operator_basis import OperatorBasis, basis_for_dimension, gell_mann_basis
from jointmeas.povm import (critical_eta, distribution_from_state, face_operators, global_povm,
                            joint_distribution, marginalize, sharp_projectors, unsharp_effects)
from jointmeas.states import bloch_from_density, random_state


def numpy_threshold(b):
    """Independent critical eta: eigenbases from numpy.linalg.eigh, full tuple scan."""
    rng = np.random.default_rng(0)
    tables = []
    for fam in b.families:
        ops = b.ops[list(fam)]
        _, v = np.linalg.eigh(np.tensordot(rng.normal(size=len(fam)), ops, axes=1))
        # per outcome k: the operator sum_j <e_k|a_j|e_k> a_j
        tables.append([np.tensordot(np.einsum("i,jil,l->j", v[:, k].conj(), ops, v[:, k]).real,
                                    ops, axes=1) for k in range(b.n)])
    worst = 0.0
    for combo in itertools.product(*tables):
        worst = min(worst, np.linalg.eigvalsh(sum(combo)).min())
    return 1.0 / -worst


@pytest.mark.parametrize("n", [2, 3, 4])
def test_threshold_matches_numpy_scan(n):
    b = basis_for_dimension(n)
    crit = critical_eta(b)
    ref = numpy_threshold(b)
    assert crit.analytic == pytest.approx(ref, abs=1e-10)
    assert crit.bisection == pytest.approx(ref, abs=1e-10)


def test_threshold_values(qubit, qutrit):
    assert critical_eta(qubit).analytic == pytest.approx(1 / np.sqrt(3), abs=1e-12)
    assert critical_eta(qutrit).analytic == pytest.approx(0.25, abs=1e-12)
    assert critical_eta(basis_for_dimension(5), bisection=False).analytic == pytest.approx(1 / 6, abs=1e-12)


def test_face_operator_identity(qutrit, ququart):
    # any complete-MUB basis gives S = n * sum_m P_m - (n + 1) I
    for b in (qutrit, ququart):
        n = b.n
        projs = [sharp_projectors(b, m).effects for m in range(b.num_families)]
        faces = face_operators(b)
        for t, s in zip(b.outcome_tuples()[::7], faces[::7]):
            expected = n * sum(projs[m][k] for m, k in enumerate(t)) - (n + 1) * np.eye(n)
            assert np.allclose(s, expected, atol=1e-12)


def test_threshold_bounded_below_by_insphere_ratio(qutrit, ququart, qubit):
    from jointmeas.geometry import h_polytope, insphere_radius
    for b in (qubit, qutrit, ququart):
        r = insphere_radius(h_polytope(b))
        assert critical_eta(b, bisection=False).analytic >= r / np.sqrt(b.n - 1) - 1e-12


@pytest.mark.parametrize("eta", [0.0, 0.2, 0.25, 0.5, 1.0])
def test_marginals_are_unsharp_effects(qutrit, eta):
    g = global_povm(qutrit, eta)
    assert g.completeness_error() < 1e-12
    for m in range(qutrit.num_families):
        marg = marginalize(g, m).effects
        assert np.allclose(marg, unsharp_effects(qutrit, m, eta).effects, atol=1e-12)


def test_psd_flag_at_threshold(qutrit):
    assert global_povm(qutrit, 0.25).psd
    assert not global_povm(qutrit, 0.26).psd


def test_sharp_effects_are_projectors(ququart):
    for m in range(ququart.num_families):
        for p in sharp_projectors(ququart, m).effects:
            assert np.allclose(p @ p, p, atol=1e-12)


def test_unsharp_scaling(qutrit):
    for m in range(4):
        e = unsharp_effects(qutrit, m, 0.3).effects
        p = sharp_projectors(qutrit, m).effects
        assert np.allclose(e, 0.3 * p + 0.7 * np.eye(3) / 3, atol=1e-12)


def test_gell_mann_marginal_is_not_projective():
    gm = gell_mann_basis()
    g = global_povm(gm, 1.0)
    assert g.elements.shape == (3 ** 8, 3, 3)
    e = marginalize(g, 0).effects
    # the marginal equals the single-operator effect, far from its spectral projector
    _, v = np.linalg.eigh(gm.ops[0])
    dist = max(min(np.linalg.norm(ek - np.outer(v[:, j], v[:, j].conj())) for j in range(3))
               for ek in e)
    assert dist > 0.1


def test_distribution_consistency(qutrit):
    g = global_povm(qutrit, 0.25)
    for seed in range(30):
        rho = random_state(3, "mixed", seed)
        a = distribution_from_state(rho, g).p
        b = joint_distribution(bloch_from_density(rho, qutrit), qutrit, 0.25).p
        assert np.allclose(a, b, atol=1e-13)
        assert a.sum() == pytest.approx(1.0, abs=1e-12)
        assert a.min() >= 0


def test_marginal_of_distribution(qutrit):
    rho = random_state(3, "pure", 1)
    d = joint_distribution(bloch_from_density(rho, qutrit), qutrit, 0.6)
    for m in range(4):
        e = unsharp_effects(qutrit, m, 0.6).effects
        assert np.allclose(d.marginal(m, 3), np.einsum("ij,kji->k", rho, e).real, atol=1e-13)


def test_eta_out_of_range(qutrit):
    with pytest.raises(EtaOutOfRange):
        global_povm(qutrit, 1.5)
    with pytest.raises(EtaOutOfRange):
        unsharp_effects(qutrit, 0, -0.1)


def test_degenerate_basis():
    # a single identity-like family has only PSD faces
    b = OperatorBasis(2, np.zeros((1, 2, 2)), [(0,)], "zero")
    with pytest.raises(DegenerateBasis):
        critical_eta(b)
