import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from betajacobi.eigencore import (
    SpectrumQuery,
    dense_sym_eigen,
    eigenvalues_by_index,
    extreme_eigenvalues,
    gershgorin_bounds,
    singular_values,
    sturm_count,
    tridiagonal_eigenvalues,
)
from betajacobi.exceptions import ContractError, ParameterError
from betajacobi.matcore import Bidiagonal, SymTridiagonal


def _random_tri(n, seed):
    rng = np.random.default_rng(seed)
    return SymTridiagonal(rng.normal(size=n), rng.normal(size=n - 1))


def test_two_by_two():
    t = SymTridiagonal([2.0, 2.0], [1.0])
    assert sturm_count(t, 2.0) == 1
    np.testing.assert_allclose(extreme_eigenvalues(t, SpectrumQuery(2)), [1.0, 3.0], atol=1e-12)
    np.testing.assert_allclose(extreme_eigenvalues(t, SpectrumQuery(1, "largest")), [3.0], atol=1e-12)


def test_count_below_gershgorin_is_zero():
    t = _random_tri(10, 0)
    lo, hi = gershgorin_bounds(t)
    assert sturm_count(t, lo) == 0
    assert sturm_count(t, hi) == 10


@pytest.mark.parametrize("seed", range(20))
def test_count_matches_dense(seed):
    t = _random_tri(8, seed)
    ev = np.linalg.eigvalsh(t.to_dense())
    xs = np.linspace(ev[0] - 1, ev[-1] + 1, 41)
    np.testing.assert_array_equal(sturm_count(t, xs), [(ev < x).sum() for x in xs])


def test_count_strict_at_eigenvalue():
    # diag(0, 1, 2) decoupled: zero pivots must not miscount
    t = SymTridiagonal([0.0, 1.0, 2.0], [0.0, 0.0])
    assert [sturm_count(t, x) for x in (0.0, 1.0, 2.0, 2.5)] == [0, 1, 2, 3]


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 30), seed=st.integers(0, 10**6), x=st.floats(-5, 5), y=st.floats(-5, 5))
def test_count_monotone(n, seed, x, y):
    t = _random_tri(n, seed)
    lo, hi = min(x, y), max(x, y)
    assert sturm_count(t, lo) <= sturm_count(t, hi)


@pytest.mark.parametrize("n", [1, 2, 5, 8])
def test_full_spectrum_matches_jacobi(n):
    for seed in range(10):
        t = _random_tri(n, 100 * n + seed)
        np.testing.assert_allclose(tridiagonal_eigenvalues(t), dense_sym_eigen(t.to_dense()), atol=1e-10)


def test_tolerance_certified_by_count():
    t = _random_tri(40, 3)
    ev = eigenvalues_by_index(t, np.arange(40), tolerance=1e-12)
    below = sturm_count(t, ev - 1e-11)
    above = sturm_count(t, ev + 1e-11)
    np.testing.assert_array_equal(below, np.arange(40))
    np.testing.assert_array_equal(above, np.arange(1, 41))


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 30), seed=st.integers(0, 10**6))
def test_interlacing_and_trace(n, seed):
    t = _random_tri(n, seed)
    ev = tridiagonal_eigenvalues(t)
    sub = tridiagonal_eigenvalues(t.leading(n - 1))
    assert np.all(ev[:-1] <= sub + 1e-10) and np.all(sub <= ev[1:] + 1e-10)
    assert ev.sum() == pytest.approx(t.diag.sum(), rel=1e-8, abs=1e-10)


def test_sign_flip_invariance():
    t = _random_tri(12, 5)
    flipped = SymTridiagonal(t.diag, -t.offdiag * np.where(np.arange(11) % 2 == 0, 1, -1))
    np.testing.assert_allclose(tridiagonal_eigenvalues(t), tridiagonal_eigenvalues(flipped), atol=1e-12)


def test_extreme_orderings():
    t = _random_tri(20, 8)
    full = np.linalg.eigvalsh(t.to_dense())
    np.testing.assert_allclose(extreme_eigenvalues(t, SpectrumQuery(3)), full[:3], atol=1e-11)
    np.testing.assert_allclose(extreme_eigenvalues(t, SpectrumQuery(3, "largest")), full[::-1][:3], atol=1e-11)


def test_query_validation():
    with pytest.raises(ParameterError):
        SpectrumQuery(0)
    with pytest.raises(ParameterError):
        SpectrumQuery(1, "middle")
    with pytest.raises(ParameterError):
        extreme_eigenvalues(_random_tri(3, 0), SpectrumQuery(4))


def test_singular_values_relative_accuracy():
    # graded matrix: smallest singular value ~1e-12, kept to high relative accuracy
    d = np.logspace(0, -12, 10)
    b = Bidiagonal(d, 0.5 * d[1:])
    sv = singular_values(b, 10, "smallest")
    ref = np.sort(np.linalg.svd(b.to_dense(), compute_uv=False))
    np.testing.assert_allclose(sv, ref, rtol=1e-10)
    np.testing.assert_allclose(singular_values(b, 2, "largest"), ref[::-1][:2], rtol=1e-12)


def test_dense_identity_rank_one():
    np.testing.assert_allclose(dense_sym_eigen(np.eye(5)), np.ones(5), atol=1e-15)
    v = np.array([1.0, 2.0, -2.0, 0.5])
    ev = dense_sym_eigen(np.outer(v, v))
    np.testing.assert_allclose(ev, [0, 0, 0, v @ v], atol=1e-12)


def test_dense_matches_bisection_n50():
    t = _random_tri(50, 9)
    np.testing.assert_allclose(dense_sym_eigen(t.to_dense()), tridiagonal_eigenvalues(t), atol=1e-9)


def test_dense_rejects_asymmetric():
    with pytest.raises(ContractError):
        dense_sym_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ContractError):
        dense_sym_eigen(np.ones((2, 3)))
