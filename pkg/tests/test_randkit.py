import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from betajacobi.exceptions import ParameterError
from betajacobi.randkit import (
    RngStream,
    beta_joint_moment,
    extend_brownian,
    refine_brownian,
    sample_beta,
    sample_brownian,
    sample_gamma,
)


def test_stream_reproducible():
    a = RngStream(5, 3).normal(10)
    b = RngStream(5, 3).normal(10)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, RngStream(5, 4).normal(10))


@pytest.mark.parametrize("seed", [-1, 2**64, 1.5, True, "3"])
def test_stream_rejects_bad_seed(seed):
    with pytest.raises(ParameterError):
        RngStream(seed)


def test_substream_ignores_state():
    s = RngStream(9)
    s.normal(5)
    np.testing.assert_array_equal(s.substream(2).uniform(4), RngStream(9, 2).uniform(4))


@pytest.mark.parametrize("shape", [0.05, 0.7, 1.0, 3.5, 250.0])
def test_gamma_matches_scipy(shape):
    x = sample_gamma(shape, RngStream(1), size=20000)
    assert stats.kstest(x, stats.gamma(shape).cdf).pvalue > 1e-3
    assert np.all(x > 0)


def test_gamma_rejects_nonpositive():
    with pytest.raises(ParameterError):
        sample_gamma(0.0, RngStream(1))


@pytest.mark.parametrize("p,q", [(0.3, 0.3), (1.0, 1.0), (2.5, 7.0), (400.0, 3.0)])
def test_beta_moments(p, q):
    y = sample_beta(p, q, RngStream(2), size=40000)
    assert np.all((y > 0) & (y < 1))
    for i, j in [(1, 0), (2, 0), (1, 1), (0, 2)]:
        exact = beta_joint_moment(p, q, i, j)
        est = np.mean(y**i * (1 - y) ** j)
        se = np.std(y**i * (1 - y) ** j) / math.sqrt(y.size)
        assert abs(est - exact) < 5 * se + 1e-12


def test_beta_tiny_shapes_stay_inside():
    y = sample_beta(1e-3, 1e-3, RngStream(3), size=5000)
    assert np.all((y > 0) & (y < 1))


def test_beta_moment_closed_form():
    assert beta_joint_moment(2.0, 3.0, 1, 0) == pytest.approx(0.4)
    assert beta_joint_moment(2.0, 3.0, 0, 0) == 1.0
    # E[Y(1-Y)] = pq / ((p+q)(p+q+1))
    assert beta_joint_moment(2.0, 3.0, 1, 1) == pytest.approx(6 / 30)


@settings(max_examples=50, deadline=None)
@given(p=st.floats(0.1, 50), q=st.floats(0.1, 50), i=st.integers(0, 4), j=st.integers(0, 4))
def test_beta_moment_matches_quadrature(p, q, i, j):
    from scipy.special import betaln

    exact = math.exp(betaln(p + i, q + j) - betaln(p, q))
    assert beta_joint_moment(p, q, i, j) == pytest.approx(exact, rel=1e-9)


def test_brownian_increments():
    path = sample_brownian(10.0, 0.01, RngStream(4))
    assert path.values[0] == 0.0
    assert len(path) == 1001
    inc = path.increments
    assert stats.kstest(inc / math.sqrt(0.01), "norm").pvalue > 1e-3


def test_brownian_grid_rounds_up():
    path = sample_brownian(1.0, 0.3, RngStream(4))
    assert len(path) == 5
    assert path.length == pytest.approx(1.2)


def test_refine_keeps_old_values_and_variance():
    base = sample_brownian(1.0, 0.01, RngStream(5))
    fine = refine_brownian(base, RngStream(6))
    np.testing.assert_array_equal(fine.values[::2], base.values)
    assert fine.step == pytest.approx(0.005)
    # bridge midpoint deviation has variance h/4
    dev = fine.values[1::2] - 0.5 * (base.values[:-1] + base.values[1:])
    assert np.var(dev) == pytest.approx(0.01 / 4, rel=0.2)


def test_extend_preserves_prefix():
    base = sample_brownian(1.0, 0.1, RngStream(7))
    longer = extend_brownian(base, 3.0, RngStream(8))
    np.testing.assert_array_equal(longer.values[: len(base)], base.values)
    assert longer.length == pytest.approx(3.0)
    assert extend_brownian(base, 0.5, RngStream(8)) is base


def test_brownian_rejects_bad_grid():
    with pytest.raises(ParameterError):
        sample_brownian(1.0, 2.0, RngStream(1))
    with pytest.raises(ParameterError):
        sample_brownian(-1.0, 0.1, RngStream(1))
