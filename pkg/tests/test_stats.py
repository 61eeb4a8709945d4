import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy import stats as sps

from betajacobi.exceptions import ParameterError
from betajacobi.jacobi import density_cdf, density_rho, spectral_edges
from betajacobi.stats import (
    EmpiricalDistribution,
    histogram,
    ks_two_sample,
    l1_density_distance,
    quantiles,
)

finite = st.floats(-1e6, 1e6, allow_nan=False)


def test_ks_trivial_cases():
    a = EmpiricalDistribution([3.0, 1.0, 2.0])
    assert a.count == 3 and a.samples.tolist() == [1.0, 2.0, 3.0]
    assert ks_two_sample(a, a) == 0.0
    assert ks_two_sample([0.0, 1.0], [5.0, 6.0]) == 1.0
    with pytest.raises(ParameterError):
        ks_two_sample([], [1.0])


@settings(max_examples=60, deadline=None)
@given(a=arrays(float, st.integers(1, 40), elements=finite), b=arrays(float, st.integers(1, 40), elements=finite))
@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_ks_matches_scipy_and_symmetric(a, b):
    d = ks_two_sample(a, b)
    assert d == pytest.approx(sps.ks_2samp(a, b).statistic, abs=1e-12)
    assert d == ks_two_sample(b, a)
    assert ks_two_sample(np.random.default_rng(0).permutation(a), b) == d


@settings(max_examples=40, deadline=None)
@given(a=arrays(float, st.integers(1, 20), elements=finite), b=arrays(float, st.integers(1, 20), elements=finite),
       c=arrays(float, st.integers(1, 20), elements=finite))
def test_ks_triangle(a, b, c):
    assert ks_two_sample(a, c) <= ks_two_sample(a, b) + ks_two_sample(b, c) + 1e-12


def test_ks_null_distribution():
    rng = np.random.default_rng(1)
    vals = [ks_two_sample(rng.normal(size=10000), rng.normal(size=10000)) for _ in range(20)]
    assert np.median(vals) < 0.03


def test_quantiles():
    d = EmpiricalDistribution([3.0, 1.0, 2.0])
    assert quantiles(d, [0.0, 0.5, 1.0]).tolist() == [1.0, 2.0, 3.0]
    with pytest.raises(ParameterError):
        quantiles(d, [1.5])
    with pytest.raises(ParameterError):
        quantiles(d, [-0.1])


@settings(max_examples=60, deadline=None)
@given(x=arrays(float, st.integers(1, 50), elements=finite), p=st.lists(st.floats(0, 1), min_size=1, max_size=5))
def test_quantiles_match_numpy(x, p):
    np.testing.assert_allclose(quantiles(x, p), np.quantile(x, p), rtol=1e-12, atol=1e-9)


def _sample_density(g1, g2, size, seed):
    lo, hi = spectral_edges(g1, g2)
    u = np.random.default_rng(seed).random(size)
    grid = np.linspace(lo, hi, 4001)
    return np.interp(u, density_cdf(grid, g1, g2), grid)


def test_l1_self_sampling():
    g1, g2 = 2.0, 3.0
    lo, hi = spectral_edges(g1, g2)
    x = _sample_density(g1, g2, 10**6, 0)
    h = histogram(x, 50, (lo, hi))
    d_cdf = l1_density_distance(h, support=(lo, hi), cdf=lambda v: density_cdf(v, g1, g2))
    d_rho = l1_density_distance(h, rho=lambda v: density_rho(v, g1, g2), support=(lo, hi))
    assert d_cdf < 0.02
    assert d_rho == pytest.approx(d_cdf, abs=1e-4)


def test_l1_decreases_with_sample_size():
    g1, g2 = 2.0, 3.0
    lo, hi = spectral_edges(g1, g2)
    cdf = lambda v: density_cdf(v, g1, g2)
    small = l1_density_distance(histogram(_sample_density(g1, g2, 1000, 1), 50, (lo, hi)), support=(lo, hi), cdf=cdf)
    large = l1_density_distance(histogram(_sample_density(g1, g2, 100000, 2), 50, (lo, hi)), support=(lo, hi), cdf=cdf)
    assert large < small


def test_l1_empty_overlap_is_two():
    g1, g2 = 2.0, 3.0
    lo, hi = spectral_edges(g1, g2)
    h = histogram(np.full(100, hi + 0.01), 10, (hi, hi + 0.02))
    assert l1_density_distance(h, support=(lo, hi), cdf=lambda v: density_cdf(v, g1, g2)) == pytest.approx(2.0)


def test_histogram_mass():
    h = histogram([0.1, 0.2, 0.9, 5.0], 2, (0.0, 1.0))
    np.testing.assert_allclose(h.mass, [0.5, 0.25])
    with pytest.raises(ParameterError):
        histogram([], 3)
