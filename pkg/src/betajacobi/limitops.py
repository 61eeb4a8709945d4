"""Discretized limit operators.

* Stochastic Airy operator ``-d^2/dx^2 + x + (2/sqrt(beta)) b'(x)`` on
  ``[0, L]`` with Dirichlet ends, by finite differences on the white-noise
  increments.
* Inverse stochastic Bessel operator: the symmetric kernel
  ``g(x, y) = int_0^{x^y} exp(a z + (2/sqrt(beta)) b(z)) dz`` against the
  measure ``exp(-(a+1) y - (2/sqrt(beta)) b(y)) dy``.
* The lower-triangular limit kernel ``r(x) exp(s(x) - s(y) + int_y^x phi dB)``
  on ``(0, 1]`` for both hard-edge regimes, and the finite-n step kernel
  built from ``sqrt(m_n) W``.

All three kernels have the semiseparable form ``K_ij = p_i q_j`` for
``j <= i`` after quadrature. The inverse of such a matrix is lower
bidiagonal, so the spectrum of ``(K K^T)^{-1}`` is the set of squared
singular values of an explicit bidiagonal matrix and is computed by
bisection without ever forming a dense matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigencore import SpectrumQuery, dense_sym_eigen, extreme_eigenvalues, singular_values
from .exceptions import ContractError, NumericalFailure, ParameterError
from .matcore import Bidiagonal, SymTridiagonal
from .randkit import BrownianPath, _grid_points

__all__ = [
    "GridSpec",
    "KernelOperator",
    "sae_discretize",
    "sae_eigenvalues",
    "sbo_inverse_kernel",
    "sbo_eigenvalues",
    "kernel_eigenvalues",
    "limit_kernel_jacobi",
    "limit_kernel_from_sbo_path",
    "regime_coefficients",
    "variance_clock",
    "discrete_inverse_kernel",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid ``0, h, ..., ceil(L/h) h``."""

    length: float
    step: float

    def __post_init__(self):
        npts = _grid_points(self.length, self.step)
        if npts < 3:
            raise ParameterError(f"grid needs at least 3 points, got {npts}")

    @property
    def points(self) -> int:
        return _grid_points(self.length, self.step)

    @property
    def nodes(self) -> np.ndarray:
        return self.step * np.arange(self.points)


def _noise_scale(beta: float) -> float:
    if not beta > 0:
        raise ParameterError(f"beta must be positive, got {beta}")
    return 0.0 if math.isinf(beta) else 2.0 / math.sqrt(beta)


def _check_path(grid: GridSpec, path: BrownianPath):
    if path is None:
        return
    if not math.isclose(path.step, grid.step, rel_tol=1e-12):
        raise ContractError(f"path step {path.step} does not match grid step {grid.step}")
    if len(path) < grid.points:
        raise ContractError(f"path has {len(path)} values, grid needs {grid.points}")


# -- stochastic Airy ------------------------------------------------------------

def sae_discretize(beta: float, grid: GridSpec, path: BrownianPath | None, slope: float = 1.0) -> SymTridiagonal:
    """Finite-difference stochastic Airy matrix on the interior nodes ``x_i = i h``.

    Diagonal ``2/h^2 + slope x_i + (2/sqrt(beta)) (b(x_{i+1}) - b(x_i)) / h``,
    off-diagonal ``-1/h^2``. ``beta = inf`` or ``path = None`` switches the
    noise off; ``slope = 0`` leaves the bare Dirichlet Laplacian.
    """
    _check_path(grid, path)
    h = grid.step
    x = grid.nodes[1:-1]
    diag = 2.0 / h**2 + slope * x
    scale = _noise_scale(beta)
    if scale and path is not None:
        db = path.values[2 : grid.points] - path.values[1 : grid.points - 1]
        diag = diag + scale * db / h
    return SymTridiagonal(diag, np.full(x.size - 1, -1.0 / h**2))


def sae_eigenvalues(beta: float, grid: GridSpec, path: BrownianPath | None, k: int, tolerance=1e-10) -> np.ndarray:
    """Bottom ``k`` eigenvalues ``Lambda_0 < ... < Lambda_{k-1}``."""
    return extreme_eigenvalues(sae_discretize(beta, grid, path), SpectrumQuery(k, "smallest", tolerance))


# -- semiseparable kernels ------------------------------------------------------

@dataclass(frozen=True)
class KernelOperator:
    """Quadrature discretization of a lower-triangular (Volterra) kernel.

    The discretized operator is ``K_ij = exp(log_left_i + log_right_j)`` for
    ``j <= i`` (quadrature weights already folded in symmetrically, i.e.
    ``K_ij = sqrt(w_i) k(x_i, x_j) sqrt(w_j)``). The symmetric operator of
    interest is ``K K^T`` and its eigenvalue problem ``f = lambda K K^T f``.
    """

    nodes: np.ndarray
    measure_weights: np.ndarray
    log_left: np.ndarray
    log_right: np.ndarray

    def __post_init__(self):
        n = len(self.nodes)
        for name in ("measure_weights", "log_left", "log_right"):
            if len(getattr(self, name)) != n:
                raise ContractError(f"{name} has length {len(getattr(self, name))}, expected {n}")

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def matrix(self) -> np.ndarray:
        """Dense lower-triangular ``K``."""
        i, j = np.tril_indices(self.size)
        out = np.zeros((self.size, self.size))
        out[i, j] = np.exp(self.log_left[i] + self.log_right[j])
        return out

    @property
    def symmetric_matrix(self) -> np.ndarray:
        """Dense ``K K^T``."""
        k = self.matrix
        s = k @ k.T
        return 0.5 * (s + s.T)

    def inverse_bidiagonal(self) -> Bidiagonal:
        """``K^{-1}``: diagonal ``1/(p_i q_i)``, subdiagonal ``-1/(p_i q_{i+1})``."""
        lp, lq = self.log_left, self.log_right
        return Bidiagonal(np.exp(-lp - lq), -np.exp(-lp[:-1] - lq[1:]), lower=True)


def sbo_inverse_kernel(beta: float, a: float, grid: GridSpec, path: BrownianPath | None) -> KernelOperator:
    """Discretized inverse Bessel operator on nodes ``x_i = i h``, ``i = 1..N``.

    ``g(x_i)`` is the trapezoid value of ``int_0^{x_i} exp(a z + (2/sqrt(beta)) b(z)) dz``;
    ``w_j = h exp(-(a+1) x_j - (2/sqrt(beta)) b(x_j))``. The symmetrized
    matrix ``A_ij = sqrt(w_i w_j) g(x_i ^ x_j)`` equals ``K K^T`` with
    ``K_ij = sqrt(w_i) sqrt(g_j - g_{j-1})`` for ``j <= i``.
    """
    if not a > -1:
        raise ParameterError(f"a must exceed -1, got {a}")
    _check_path(grid, path)
    scale = _noise_scale(beta)
    x = grid.nodes
    b = path.values[: grid.points] if (path is not None and scale) else np.zeros(grid.points)
    inner = a * x + scale * b
    # trapezoid cell integrals in log space: log(h/2 (e^u + e^v))
    cells = np.logaddexp(inner[:-1], inner[1:]) + math.log(grid.step / 2)
    log_w = math.log(grid.step) - (a + 1) * x[1:] - scale * b[1:]
    return KernelOperator(
        nodes=x[1:],
        measure_weights=np.exp(log_w),
        log_left=0.5 * log_w,
        log_right=0.5 * cells,
    )


def kernel_eigenvalues(op: KernelOperator, k: int) -> np.ndarray:
    """Smallest ``k`` eigenvalues of ``(K K^T)^{-1}``, ascending."""
    if not 1 <= k <= op.size:
        raise ParameterError(f"k must lie in [1, {op.size}]")
    sv = singular_values(op.inverse_bidiagonal(), k, "smallest")
    if not np.all(np.isfinite(sv)) or np.any(sv <= 0):
        raise NumericalFailure("degenerate discretization: non-positive inverse singular value")
    return sv * sv


def sbo_eigenvalues(op: KernelOperator, k: int, dense: bool = False) -> np.ndarray:
    """``Lambda_i = 1 / mu_i`` for the ``k`` largest eigenvalues ``mu`` of ``K K^T``, ascending.

    The default route inverts the semiseparable factor exactly and bisects
    on a bidiagonal matrix. ``dense=True`` forms ``K K^T`` and uses the Jacobi
    eigensolver instead (small grids only).
    """
    if dense:
        mu = dense_sym_eigen(op.symmetric_matrix)[::-1][:k]
        if mu[-1] <= 0:
            raise NumericalFailure("degenerate discretization: zero top eigenvalue")
        return 1.0 / mu
    return kernel_eigenvalues(op, k)


# -- hard-edge limit kernels ------------------------------------------------------

def _regime(gamma):
    if gamma is None or (isinstance(gamma, str) and gamma == "infinite"):
        return math.inf
    g = float(gamma)
    if not g >= 1:
        raise ParameterError(f"gamma must be >= 1 (or infinite), got {gamma}")
    return g


def regime_coefficients(gamma, a: float, beta: float, x):
    """``(r(x), s(x), phi(x))`` of the limit kernel.

    Finite ``gamma = lim n2/n``::

        r   = (2x + g - 1) / (sqrt(g) sqrt(x (x + g - 1)))
        s   = -(a/2) log x - (1/2) log(2x + g - 1) - (a/2) log(x + g - 1)
        phi = sqrt((2x + g - 1) / (beta x (x + g - 1)))

    ``gamma = inf`` (``n2 >> n``): ``r = 1/sqrt(x)``, ``s = -(a/2) log x``,
    ``phi = 1/sqrt(beta x)``.
    """
    g = _regime(gamma)
    x = np.asarray(x, dtype=float)
    if math.isinf(g):
        return 1 / np.sqrt(x), -(a / 2) * np.log(x), 1 / np.sqrt(beta * x)
    q = x * (x + g - 1)
    r = (2 * x + g - 1) / (math.sqrt(g) * np.sqrt(q))
    s = -(a / 2) * np.log(x) - 0.5 * np.log(2 * x + g - 1) - (a / 2) * np.log(x + g - 1)
    phi = np.sqrt((2 * x + g - 1) / (beta * q))
    return r, s, phi


def variance_clock(gamma, beta: float, x):
    """``int_x^1 phi(t)^2 dt``; differs from the integral anchored at 1/2 by a constant."""
    g = _regime(gamma)
    x = np.asarray(x, dtype=float)
    if math.isinf(g):
        return np.log(1 / x) / beta
    return (math.log(g) - np.log(x * (x + g - 1))) / beta


def _clock_inverse(gamma, t):
    """Nodes ``x`` with ``beta * variance_clock(x) = t``."""
    g = _regime(gamma)
    t = np.asarray(t, dtype=float)
    if math.isinf(g):
        return np.exp(-t)
    c = g * np.exp(-t)
    return 2 * c / ((g - 1) + np.sqrt((g - 1) ** 2 + 4 * c))


def _volterra(nodes, weights, r, s, noise_from_node):
    # k(x, y) = r(x) e^{s(x) - s(y)} e^{N(y) - N(x)}, N(x) = int_x^1 phi dB
    lw = np.log(weights)
    return KernelOperator(
        nodes=nodes,
        measure_weights=weights,
        log_left=0.5 * lw + np.log(r) + s - noise_from_node,
        log_right=0.5 * lw - s + noise_from_node,
    )


def limit_kernel_jacobi(gamma, a: float, beta: float, grid: GridSpec, path: BrownianPath | None) -> KernelOperator:
    """Limit kernel on the nodes ``h, 2h, ..., 1`` of a grid of length 1.

    The stochastic integral ``int_y^x phi dB`` is the left-point (Ito) sum
    ``sum_l phi(x_l) (B(x_{l+1}) - B(x_l))`` over nodes between ``y`` and
    ``x``. ``path`` is a Brownian path on ``[0, 1]`` with the grid's step;
    ``None`` gives the noiseless kernel.
    """
    if not a > -1:
        raise ParameterError(f"a must exceed -1, got {a}")
    if not math.isclose(grid.length, 1.0, rel_tol=1e-12):
        raise ContractError("limit kernel lives on (0, 1]; grid length must be 1")
    _check_path(grid, path)
    x = grid.nodes[1:]
    if x[0] <= 0:
        raise ContractError("singular node at 0")
    r, s, phi = regime_coefficients(gamma, a, beta, x)
    noise = np.zeros(x.size)
    if path is not None:
        db = np.diff(path.values[1 : grid.points])
        # N(x_i) = sum_{l >= i} phi(x_l) dB_l, with N(x_last) = 0
        noise[:-1] = np.cumsum((phi[:-1] * db)[::-1])[::-1]
    return _volterra(x, np.full(x.size, grid.step), r, s, noise)


def limit_kernel_from_sbo_path(gamma, a: float, beta: float, path: BrownianPath) -> KernelOperator:
    """Limit kernel on the image of the Bessel grid under the change of variables.

    The Bessel variable is ``t = beta * variance_clock(x)``, i.e.
    ``x (x + gamma - 1) = gamma e^{-t}`` (``x = e^{-t}`` when ``gamma`` is
    infinite). Nodes are ``x(t_i)`` for ``t_i = i h``, weights
    ``|dx/dt| h``, and the noise is transported as
    ``int_x^1 phi dB = -b(t(x)) / sqrt(beta)``; the spectrum of
    ``(K K^T)^{-1}`` then approximates that of the Bessel operator driven by
    ``b``.
    """
    if not a > -1:
        raise ParameterError(f"a must exceed -1, got {a}")
    g = _regime(gamma)
    t = path.grid[1:]
    x = _clock_inverse(g, t)
    r, s, phi = regime_coefficients(g, a, beta, x)
    # dt/dx = beta phi(x)^2
    weights = path.step / (beta * phi**2)
    noise = -path.values[1:] / math.sqrt(beta)
    # order nodes increasingly in x (t decreasing)
    order = np.arange(x.size)[::-1]
    return _volterra(x[order], weights[order], r[order], s[order], noise[order])


def discrete_inverse_kernel(w: Bidiagonal, m_n: float) -> KernelOperator:
    """Step kernel of ``(sqrt(m_n) W)^{-1}`` on cells ``[(i-1)/n, i/n)``.

    With diagonal ``a_i`` and subdiagonal ``-b_i`` (all positive), the
    inverse is ``(1/a_i) prod_{k=j}^{i-1} b_k / a_k`` for ``j <= i``, kept
    as cumulative log ratios. The step kernel is ``n`` times that; cell
    weights ``1/n`` fold back to the matrix itself, so ``(K K^T)^{-1}`` has
    spectrum ``m_n spec(W W^T)``.
    """
    if not w.lower:
        raise ContractError("expected a lower bidiagonal matrix")
    a = math.sqrt(m_n) * w.diag
    b = -math.sqrt(m_n) * w.offdiag
    if np.any(a <= 0) or np.any(b <= 0):
        raise ContractError("expected positive diagonal and negative subdiagonal entries")
    n = w.n
    logs = np.concatenate([[0.0], np.cumsum(np.log(b) - np.log(a[:-1]))])
    nodes = np.arange(1, n + 1) / n
    return KernelOperator(
        nodes=nodes,
        measure_weights=np.full(n, 1.0 / n),
        log_left=logs - np.log(a),
        log_right=-logs,
    )
