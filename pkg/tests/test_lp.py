import numpy as np
import pytest
import scipy.optimize

from jointmeas.lp import linprog, simplex_standard


@pytest.mark.parametrize("seed", range(60))
def test_matches_scipy(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(2, 8), rng.integers(2, 8)
    a = rng.normal(size=(m, n))
    b = rng.uniform(0.5, 2, size=m)
    c = rng.normal(size=n)
    ours = linprog(c, a_ub=a, b_ub=b)
    ref = scipy.optimize.linprog(c, A_ub=a, b_ub=b, bounds=[(0, None)] * n, method="highs")
    if ref.status == 3:
        assert ours.status == "unbounded"
    else:
        assert ours.status == "optimal"
        assert ours.fun == pytest.approx(ref.fun, abs=1e-7)


def test_infeasible():
    res = simplex_standard([1.0, 1.0], [[1.0, 1.0]], [-1.0])
    assert res.status == "infeasible"


def test_free_variables():
    # minimize x subject to x >= -3 written as -x <= 3
    res = linprog([1.0], a_ub=[[-1.0]], b_ub=[3.0], free=True)
    assert res.status == "optimal" and res.x[0] == pytest.approx(-3.0)


def test_degenerate_cycling_example():
    # Beale's example cycles without an anti-cycling rule
    c = [-0.75, 150, -0.02, 6]
    a = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
    res = linprog(c, a_ub=a, b_ub=[0, 0, 1])
    assert res.status == "optimal" and res.fun == pytest.approx(-0.05)
