"""Bidiagonal and symmetric tridiagonal matrices.

Only the structure needed by the ensemble models is provided: Gram assembly
``B B^T``, the Golub-Kahan doubling, the closed-form inverse of a lower
bidiagonal matrix and the angle-product determinant identities.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ContractError, SingularMatrixError

__all__ = [
    "Bidiagonal",
    "SymTridiagonal",
    "gram",
    "double",
    "invert_lower_bidiagonal",
    "det_identities",
]


@dataclass(frozen=True)
class Bidiagonal:
    """``n x n`` bidiagonal matrix.

    ``offdiag[k]`` sits at ``(k+1, k)`` when ``lower`` and at ``(k, k+1)``
    otherwise.
    """

    diag: np.ndarray
    offdiag: np.ndarray
    lower: bool = True

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float).ravel()
        e = np.asarray(self.offdiag, dtype=float).ravel()
        if d.size == 0:
            raise ContractError("empty bidiagonal matrix")
        if e.size != d.size - 1:
            raise ContractError(f"offdiag must have {d.size - 1} entries, got {e.size}")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        out = np.diag(self.diag)
        k = -1 if self.lower else 1
        return out + np.diag(self.offdiag, k)

    def transpose(self) -> "Bidiagonal":
        return Bidiagonal(self.diag, self.offdiag, not self.lower)

    def scaled(self, factor: float) -> "Bidiagonal":
        return Bidiagonal(factor * self.diag, factor * self.offdiag, self.lower)


@dataclass(frozen=True)
class SymTridiagonal:
    """Symmetric tridiagonal matrix stored by its diagonal and first off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float).ravel()
        e = np.asarray(self.offdiag, dtype=float).ravel()
        if d.size == 0:
            raise ContractError("empty tridiagonal matrix")
        if e.size != d.size - 1:
            raise ContractError(f"offdiag must have {d.size - 1} entries, got {e.size}")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def leading(self, m: int) -> "SymTridiagonal":
        """Leading ``m x m`` principal submatrix."""
        return SymTridiagonal(self.diag[:m], self.offdiag[: m - 1])

    def affine(self, scale: float, shift: float) -> "SymTridiagonal":
        """``scale * T + shift * I``."""
        return SymTridiagonal(scale * self.diag + shift, scale * self.offdiag)


def gram(b: Bidiagonal) -> SymTridiagonal:
    """``B B^T`` as a symmetric tridiagonal matrix."""
    x, y = b.diag, b.offdiag
    d = x * x
    if b.lower:
        d[1:] += y * y
        e = x[:-1] * y
    else:
        d[:-1] += y * y
        e = y * x[1:]
    return SymTridiagonal(d, e)


def double(b: Bidiagonal) -> SymTridiagonal:
    """Zero-diagonal ``2n x 2n`` tridiagonal matrix with off-diagonal ``a1, b1, a2, ..., an``.

    Its eigenvalues are plus and minus the singular values of ``b``.
    """
    n = b.n
    e = np.empty(2 * n - 1)
    e[0::2] = b.diag
    e[1::2] = b.offdiag
    return SymTridiagonal(np.zeros(2 * n), e)


def invert_lower_bidiagonal(b: Bidiagonal) -> np.ndarray:
    """Dense inverse of a lower bidiagonal matrix from the closed-form product.

    With diagonal ``a`` and subdiagonal ``-c`` (so ``c = -offdiag``) the inverse
    is ``[B^-1]_{ij} = (1/a_i) prod_{k=j}^{i-1} c_k / a_k`` for ``j <= i``.
    Products are accumulated as sums of logarithms and exponentiated entrywise,
    so long ratio chains neither overflow nor underflow prematurely.
    """
    if not b.lower:
        raise ContractError("expected a lower bidiagonal matrix")
    a = b.diag
    if np.any(a == 0):
        raise SingularMatrixError("zero diagonal entry in bidiagonal matrix")
    n = b.n
    ratio = -b.offdiag / a[:-1]
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(ratio))
    neg = (ratio < 0).astype(np.int64)
    zero = ratio == 0
    # cumulative sums indexed so that S[i] - S[j] covers k = j .. i-1
    S = np.concatenate([[0.0], np.cumsum(np.where(zero, 0.0, logs))])
    P = np.concatenate([[0], np.cumsum(neg)])
    Z = np.concatenate([[0], np.cumsum(zero)])
    i, j = np.tril_indices(n)
    mag = S[i] - S[j] - np.log(np.abs(a[i]))
    sign = np.where((P[i] - P[j]) % 2 == 1, -1.0, 1.0) * np.sign(a[i])
    vals = np.where(Z[i] - Z[j] > 0, 0.0, sign * np.exp(mag))
    out = np.zeros((n, n))
    out[i, j] = vals
    return out


def det_identities(angles, log: bool = False):
    """Predicted ``(prod lambda_i, prod (1 - lambda_i))`` for the angle model.

    ``angles`` carries arrays ``C, S`` (length n) and ``St`` (length n-1).
    The eigenvalue products of ``M M^T`` are ``prod C_k^2 prod St_k^2`` and
    ``prod S_k^2 prod St_k^2``. With ``log=True`` the logarithms are returned,
    which is what large ``n`` comparisons should use.
    """
    C, S, St = (np.asarray(v, dtype=float) for v in (angles.C, angles.S, angles.St))
    if log:
        with np.errstate(divide="ignore"):
            lst = 2 * np.sum(np.log(St))
            return 2 * np.sum(np.log(C)) + lst, 2 * np.sum(np.log(S)) + lst
    st2 = np.prod(St * St)
    return float(np.prod(C * C) * st2), float(np.prod(S * S) * st2)
