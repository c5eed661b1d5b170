import numpy as np
import pytest

from jointmeas.errors import BadSpectra
from jointmeas.mub import build_mubs
from jointmeas.operator_basis import (OperatorBasis, basis_for_dimension, default_spectra,
                                      from_mubs, gell_mann_basis, pauli_basis, qutrit_builtin,
                                      validate)
from jointmeas.states import random_state


@pytest.mark.parametrize("make", [pauli_basis, qutrit_builtin, lambda: basis_for_dimension(4),
                                  lambda: basis_for_dimension(5), lambda: basis_for_dimension(7)])
def test_valid_bases(make):
    b = make()
    rep = validate(b)
    assert rep.passed, rep
    assert b.dim == b.n ** 2 - 1
    assert b.num_families == b.n + 1


def test_hilbert_schmidt_orthogonality_numpy(qutrit):
    gram = np.array([[np.trace(a @ c) for c in qutrit.ops] for a in qutrit.ops])
    assert np.allclose(gram, 3 * np.eye(8), atol=1e-12)


def test_builtin_eigentable(qutrit):
    s = np.sqrt(1.5)
    expected = np.array([[s, 1 / np.sqrt(2)], [0, -np.sqrt(2)], [-s, 1 / np.sqrt(2)]])
    for z in qutrit.eigentable:
        assert np.allclose(z, expected, atol=1e-12)


def test_builtin_families_are_mub_bases(qutrit):
    # each family's eigenbasis matches one basis of the field construction, up to order/phase
    m = build_mubs(3)
    for vecs in qutrit.eigvecs:
        hits = 0
        for basis in m.bases:
            ov = np.abs(basis.conj() @ vecs) ** 2
            if np.allclose(np.sort(ov, axis=0)[-1], 1.0, atol=1e-10):
                hits += 1
        assert hits == 1


def test_bessel_inequality(qutrit):
    for seed in range(200):
        rho = random_state(3, "pure" if seed % 2 else "mixed", seed)
        theta = np.einsum("ij,aji->a", rho, qutrit.ops).real
        # ||theta||^2 = n Tr(rho^2) - 1 <= n - 1
        assert theta @ theta <= 2 + 1e-10
        assert theta @ theta == pytest.approx(3 * np.trace(rho @ rho).real - 1, abs=1e-10)


def test_gell_mann_is_not_a_commuting_family_basis():
    rep = validate(gell_mann_basis())
    assert rep.orthonormality < 1e-12 and rep.hermiticity < 1e-12
    assert not rep.passed
    assert rep.unbiasedness > 0.5
    lumped = OperatorBasis(3, gell_mann_basis().ops, [tuple(range(8))], "gm-one-family")
    assert validate(lumped).commutation > 1


def test_entrywise_reference_mismatch(qutrit):
    rep = validate(from_mubs(build_mubs(3)), reference=qutrit)
    assert rep.passed
    assert rep.reference_mismatch > 0.1


@pytest.mark.parametrize("n", [2, 3, 4, 5, 8])
def test_default_spectra(n):
    c = default_spectra(n)
    assert np.allclose(c.sum(axis=1), 0, atol=1e-12)
    assert np.allclose(c @ c.T, n * np.eye(n - 1), atol=1e-12)


def test_bad_spectra():
    m = build_mubs(3)
    with pytest.raises(BadSpectra):
        from_mubs(m, np.ones((2, 3)))
    with pytest.raises(BadSpectra):
        from_mubs(m, np.ones((1, 3)))


def test_json_roundtrip(tmp_path, qutrit):
    path = tmp_path / "b.json"
    qutrit.save(path)
    back = OperatorBasis.load(path)
    assert np.array_equal(back.ops, qutrit.ops)
    assert back.families == qutrit.families
