import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from betajacobi.exceptions import ContractError, SingularMatrixError
from betajacobi.jacobi import JacobiParams, build_M, sample_angles
from betajacobi.matcore import (
    Bidiagonal,
    SymTridiagonal,
    det_identities,
    double,
    gram,
    invert_lower_bidiagonal,
)
from betajacobi.randkit import RngStream


def _bidiag(n, seed, lower=True):
    rng = np.random.default_rng(seed)
    return Bidiagonal(rng.uniform(0.5, 2, n), rng.normal(size=n - 1), lower)


@pytest.mark.parametrize("lower", [True, False])
def test_gram_matches_dense(lower):
    b = _bidiag(7, 0, lower)
    np.testing.assert_allclose(gram(b).to_dense(), b.to_dense() @ b.to_dense().T, atol=1e-14)


def test_double_spectrum_is_plus_minus_singular_values():
    b = _bidiag(6, 1)
    ev = np.linalg.eigvalsh(double(b).to_dense())
    sv = np.linalg.svd(b.to_dense(), compute_uv=False)
    np.testing.assert_allclose(np.sort(ev), np.sort(np.concatenate([sv, -sv])), atol=1e-13)


def test_transpose_and_scaled():
    b = _bidiag(4, 2)
    np.testing.assert_array_equal(b.transpose().to_dense(), b.to_dense().T)
    np.testing.assert_allclose(b.scaled(3.0).to_dense(), 3 * b.to_dense())


def test_shape_validation():
    with pytest.raises(ContractError):
        Bidiagonal([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ContractError):
        SymTridiagonal([], [])


def test_tridiagonal_helpers():
    t = SymTridiagonal([1.0, 2.0, 3.0], [0.5, 0.25])
    assert t.leading(2).to_dense().tolist() == [[1.0, 0.5], [0.5, 2.0]]
    np.testing.assert_allclose(t.affine(-2.0, 1.0).to_dense(), np.eye(3) - 2 * t.to_dense())


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(1, 12),
    data=st.data(),
)
def test_inverse_matches_numpy(n, data):
    d = data.draw(arrays(float, n, elements=st.floats(0.2, 5.0)))
    signs = data.draw(arrays(float, n, elements=st.sampled_from([-1.0, 1.0])))
    e = data.draw(arrays(float, n - 1, elements=st.floats(-3.0, 3.0)))
    b = Bidiagonal(d * signs, e)
    inv = invert_lower_bidiagonal(b)
    np.testing.assert_allclose(inv @ b.to_dense(), np.eye(n), atol=1e-9)
    assert np.all(np.triu(inv, 1) == 0)


def test_inverse_long_chain_stays_finite():
    n = 400
    b = Bidiagonal(np.full(n, 0.5), np.full(n - 1, -0.4))
    inv = invert_lower_bidiagonal(b)
    assert np.all(np.isfinite(inv))
    np.testing.assert_allclose(inv @ b.to_dense(), np.eye(n), atol=1e-10)


def test_inverse_singular():
    with pytest.raises(SingularMatrixError):
        invert_lower_bidiagonal(Bidiagonal([1.0, 0.0], [1.0]))
    with pytest.raises(ContractError):
        invert_lower_bidiagonal(Bidiagonal([1.0, 1.0], [1.0], lower=False))


@pytest.mark.parametrize("beta", [1.0, 2.0, 4.0])
def test_determinant_identities(beta):
    p = JacobiParams(8, 11.5, 9.0, beta)
    ang = sample_angles(p, RngStream(11))
    lam = np.linalg.eigvalsh(gram(build_M(ang)).to_dense())
    prod, prod_c = det_identities(ang)
    assert np.prod(lam) == pytest.approx(prod, rel=1e-10)
    assert np.prod(1 - lam) == pytest.approx(prod_c, rel=1e-10)
    lp, lpc = det_identities(ang, log=True)
    assert lp == pytest.approx(np.log(prod), rel=1e-12)
    assert lpc == pytest.approx(np.log(prod_c), rel=1e-12)
