"""Symmetric eigenvalue solvers.

* Sturm-sequence counting and bisection for symmetric tridiagonal matrices.
  This is the workhorse: every ensemble and limit-operator spectrum in the
  package is reduced to a tridiagonal (or zero-diagonal Golub-Kahan) matrix.
* Cyclic Jacobi rotations for small dense symmetric matrices, used as an
  independent oracle.

The inner loops are compiled with numba.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .exceptions import ContractError, NumericalFailure, ParameterError
from .matcore import Bidiagonal, SymTridiagonal, double

__all__ = [
    "SpectrumQuery",
    "sturm_count",
    "eigenvalues_by_index",
    "extreme_eigenvalues",
    "tridiagonal_eigenvalues",
    "singular_values",
    "dense_sym_eigen",
]

PIVOT_FLOOR = 1e-30


@dataclass(frozen=True)
class SpectrumQuery:
    count: int
    side: str = "smallest"
    tolerance: float = 1e-12

    def __post_init__(self):
        if self.count < 1:
            raise ParameterError("count must be positive")
        if self.side not in ("smallest", "largest"):
            raise ParameterError(f"side must be 'smallest' or 'largest', got {self.side!r}")
        if not self.tolerance > 0:
            raise ParameterError("tolerance must be positive")


@njit(cache=True)
def _count_below(d, e2, x, pivmin):
    count = 0
    q = d[0] - x
    if abs(q) < pivmin:
        q = pivmin
    if q < 0:
        count += 1
    for i in range(1, d.shape[0]):
        q = d[i] - x - e2[i - 1] / q
        if abs(q) < pivmin:
            q = pivmin
        if q < 0:
            count += 1
    return count


@njit(cache=True)
def _count_many(d, e2, xs, pivmin):
    out = np.empty(xs.shape[0], dtype=np.int64)
    for k in range(xs.shape[0]):
        out[k] = _count_below(d, e2, xs[k], pivmin)
    return out


@njit(cache=True)
def _bisect(d, e2, indices, lo, hi, atol, rtol, pivmin):
    out = np.empty(indices.shape[0])
    for m in range(indices.shape[0]):
        idx = indices[m]
        a = lo
        b = hi
        while True:
            width = b - a
            if width <= atol or width <= rtol * max(abs(a), abs(b)):
                break
            mid = 0.5 * (a + b)
            if mid <= a or mid >= b:
                break
            if _count_below(d, e2, mid, pivmin) > idx:
                b = mid
            else:
                a = mid
        out[m] = 0.5 * (a + b)
    return out


def _prepare(t: SymTridiagonal):
    d = np.ascontiguousarray(t.diag, dtype=float)
    e = np.ascontiguousarray(t.offdiag, dtype=float)
    e2 = e * e
    scale = max(1.0, float(np.max(np.abs(d), initial=0.0)), float(np.max(np.abs(e), initial=0.0)))
    pivmin = PIVOT_FLOOR * scale
    return d, e2, pivmin


def gershgorin_bounds(t: SymTridiagonal):
    """Interval containing the whole spectrum."""
    r = np.zeros(t.n)
    ae = np.abs(t.offdiag)
    r[:-1] += ae
    r[1:] += ae
    lo = float(np.min(t.diag - r))
    hi = float(np.max(t.diag + r))
    pad = 2 * np.finfo(float).eps * max(1.0, abs(lo), abs(hi)) + 1e-300
    return lo - pad, hi + pad


def sturm_count(t: SymTridiagonal, x):
    """Number of eigenvalues of ``t`` strictly below ``x`` (vectorized over ``x``)."""
    d, e2, pivmin = _prepare(t)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    counts = _count_many(d, e2, xs, pivmin)
    if np.ndim(x) == 0:
        return int(counts[0])
    return counts


def eigenvalues_by_index(t: SymTridiagonal, indices, tolerance=1e-12, rtol=0.0):
    """Eigenvalues with the given 0-based ascending indices, by bisection.

    Each bracket ``[a, b)`` is certified by ``sturm_count`` and shrunk until
    ``b - a <= tolerance`` (or ``<= rtol * |b|``, or machine resolution).
    """
    idx = np.atleast_1d(np.asarray(indices, dtype=np.int64))
    if idx.size and (idx.min() < 0 or idx.max() >= t.n):
        raise ParameterError(f"eigenvalue index out of range for dimension {t.n}")
    d, e2, pivmin = _prepare(t)
    lo, hi = gershgorin_bounds(t)
    return _bisect(d, e2, idx, lo, hi, float(tolerance), float(rtol), pivmin)


def extreme_eigenvalues(t: SymTridiagonal, query: SpectrumQuery) -> np.ndarray:
    """The ``query.count`` smallest or largest eigenvalues, most extreme first.

    Smallest are returned ascending, largest descending.
    """
    k = query.count
    if k > t.n:
        raise ParameterError(f"requested {k} eigenvalues of a {t.n} x {t.n} matrix")
    if query.side == "smallest":
        idx = np.arange(k)
    else:
        idx = np.arange(t.n - 1, t.n - 1 - k, -1)
    return eigenvalues_by_index(t, idx, query.tolerance)


def tridiagonal_eigenvalues(t: SymTridiagonal, tolerance=1e-13) -> np.ndarray:
    """Full spectrum, ascending."""
    return eigenvalues_by_index(t, np.arange(t.n), tolerance)


def singular_values(b: Bidiagonal, count=None, side="smallest", rtol=1e-14) -> np.ndarray:
    """Singular values of a bidiagonal matrix via bisection on its doubled matrix.

    Bisection on the zero-diagonal doubled matrix keeps high relative accuracy
    for tiny singular values, which the Gram matrix would lose. Returned most
    extreme first.
    """
    n = b.n
    k = n if count is None else int(count)
    if not 1 <= k <= n:
        raise ParameterError(f"cannot request {k} singular values of an order-{n} matrix")
    if side == "smallest":
        idx = np.arange(n, n + k)
    elif side == "largest":
        idx = np.arange(2 * n - 1, 2 * n - 1 - k, -1)
    else:
        raise ParameterError(f"unknown side {side!r}")
    return eigenvalues_by_index(double(b), idx, tolerance=1e-300, rtol=rtol)


@njit(cache=True)
def _jacobi(a, tol, max_sweeps):
    n = a.shape[0]
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        off = math.sqrt(2.0 * off)
        if off <= tol:
            return off, sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0:
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
    off = 0.0
    for p in range(n):
        for q in range(p + 1, n):
            off += a[p, q] * a[p, q]
    return math.sqrt(2.0 * off), max_sweeps


def dense_sym_eigen(a, rtol=1e-14, max_sweeps=60) -> np.ndarray:
    """All eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations, ascending.

    Sweeps continue until the off-diagonal Frobenius norm falls below
    ``rtol * ||A||_F``; ``1e-12 * ||A||_F`` is the hard failure threshold.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {a.shape}")
    norm = float(np.linalg.norm(a))
    if np.linalg.norm(a - a.T) > 1e-12 * max(norm, np.finfo(float).tiny):
        raise ContractError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    if norm == 0.0:
        return np.zeros(a.shape[0])
    off, _ = _jacobi(a, rtol * norm, max_sweeps)
    if off > 1e-12 * norm:
        raise NumericalFailure(f"Jacobi iteration stalled with off-diagonal norm {off:.3e}")
    return np.sort(np.diag(a))
