import numpy as np
import pytest
import scipy.stats

from jointmeas.errors import DimensionMismatch, InvalidDistribution
from jointmeas.povm import joint_distribution
from jointmeas.sampler import (_CHI2_999, chi2_quantile_999, counts_to_csv, goodness_of_fit,
                               merge_counts, sample)
from jointmeas.states import bloch_from_density, random_state


def test_chi2_table_against_scipy():
    for df, q in _CHI2_999.items():
        assert q == pytest.approx(scipy.stats.chi2.ppf(0.999, df), abs=1e-3)
    for df in (30, 100, 500):
        assert chi2_quantile_999(df) == pytest.approx(scipy.stats.chi2.ppf(0.999, df), rel=2e-3)


def test_uniform_counts(qutrit):
    d = joint_distribution(np.zeros(8), qutrit, 1.0)
    c = sample(d, 81_000, seed=3)
    assert c.counts.sum() == 81_000
    assert np.all(np.abs(c.counts - 1000) < 5 * np.sqrt(1000))


@pytest.mark.parametrize("seed", range(5))
def test_fit(qutrit, seed):
    d = joint_distribution(bloch_from_density(random_state(3, "mixed", seed), qutrit), qutrit, 0.25)
    c = sample(d, 100_000, seed)
    fit = goodness_of_fit(c, d)
    assert fit.tv < 0.02
    assert not fit.rejected


def test_wrong_distribution_rejected(qutrit):
    d = joint_distribution(bloch_from_density(random_state(3, "pure", 0), qutrit), qutrit, 0.25)
    c = sample(d, 100_000, 0)
    assert goodness_of_fit(c, d.p[::-1]).rejected


def test_reproducible_and_workers(qutrit):
    d = joint_distribution(np.zeros(8), qutrit, 1.0)
    assert np.array_equal(sample(d, 5000, 1).counts, sample(d, 5000, 1).counts)
    a = sample(d, 5001, 1, workers=4)
    assert a.total == 5001 and a.counts.sum() == 5001
    assert np.array_equal(a.counts, sample(d, 5001, 1, workers=4).counts)
    merged = merge_counts(a, a)
    assert merged.total == 10002


def test_clipping():
    p = np.array([0.5, 0.5 + 5e-10, -5e-10])
    assert sample(p, 100).counts[2] == 0
    with pytest.raises(InvalidDistribution):
        sample(np.array([0.6, 0.6, -0.2]), 100)


def test_fit_shape_mismatch(qutrit):
    c = sample(np.full(3, 1 / 3), 100)
    with pytest.raises(DimensionMismatch):
        goodness_of_fit(c, np.full(4, 0.25))


def test_csv(tmp_path, qutrit):
    d = joint_distribution(np.zeros(8), qutrit, 1.0)
    counts_to_csv(sample(d, 810), d, tmp_path / "s.csv")
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == "outcome,analytic_p,empirical_frequency,deviation"
    assert len(lines) == 82 and lines[1].startswith("0-0-0-0,")
