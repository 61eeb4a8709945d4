"""The beta-Jacobi ensemble through its bidiagonal angle model.

An ensemble ``J(n, n1, n2, beta)`` is sampled as the squared singular values
of a random lower bidiagonal matrix ``M`` whose entries are products of
independent cosines/sines ``C_k, S_k`` (length n) and ``Ct_k, St_k``
(length n-1, with the convention ``St_n = 1``)::

    C_k^2  ~ Beta(beta/2 (n1 - n + k), beta/2 (n2 - n + k))
    Ct_k^2 ~ Beta(beta/2 k, beta/2 (n1 + n2 - 2n + k + 1))

Upper soft edge: ``alpha_n (Lambda_+ - lambda_l)`` for the largest
eigenvalues. Lower hard edge: ``n n2 lambda_l`` for the smallest.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate

from .eigencore import SpectrumQuery, extreme_eigenvalues, singular_values
from .exceptions import DegenerateScalingError, ParameterError
from .matcore import Bidiagonal, SymTridiagonal, gram
from .randkit import RngStream, _beta_pair

__all__ = [
    "JacobiParams",
    "JacobiAngles",
    "ScalingConstants",
    "sample_angles",
    "build_M",
    "build_W",
    "build_Z",
    "scaling_constants",
    "spectral_edges",
    "density_rho",
    "density_cdf",
    "density_normalization",
    "build_Hn",
    "soft_edge_sample",
    "hard_edge_sample",
    "hard_edge_scale",
    "sample_eigenvalues",
    "DriftReport",
    "drift_variance_diagnostic",
]


@dataclass(frozen=True)
class JacobiParams:
    """Parameters ``(n, n1, n2, beta)``; ``n1`` and ``n2`` may be non-integer.

    Every Beta shape must be positive, i.e. ``n1 > n - 1`` and ``n2 > n - 1``.
    The hard-edge offset is ``a = n1 - n`` which may lie anywhere in (-1, inf).
    """

    n: int
    n1: float
    n2: float
    beta: float = 2.0

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ParameterError(f"beta must be positive and finite, got {self.beta}")
        for name in ("n1", "n2"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > self.n - 1):
                raise ParameterError(
                    f"{name} must exceed n - 1 = {self.n - 1} so that all Beta shapes are positive, got {v}"
                )
            object.__setattr__(self, name, v)

    @property
    def a(self) -> float:
        return self.n1 - self.n

    def swapped(self) -> "JacobiParams":
        return JacobiParams(self.n, self.n2, self.n1, self.beta)


@dataclass(frozen=True)
class JacobiAngles:
    C: np.ndarray
    S: np.ndarray
    Ct: np.ndarray
    St: np.ndarray

    @property
    def n(self) -> int:
        return self.C.size


@dataclass(frozen=True)
class ScalingConstants:
    c: float
    s: float
    ct: float
    st: float
    lambda_plus: float
    lambda_minus: float
    m_n: float
    alpha_n: float
    denominator: float = field(default=float("nan"))

    @property
    def cs_prod(self) -> float:
        """``c s ct st``."""
        return self.c * self.s * self.ct * self.st


def sample_angles(params: JacobiParams, stream: RngStream) -> JacobiAngles:
    """Draw the independent angle variables of the bidiagonal model."""
    n, b2 = params.n, params.beta / 2
    k = np.arange(1, n + 1)
    y, ybar = _beta_pair(b2 * (params.n1 - n + k), b2 * (params.n2 - n + k), stream)
    kt = np.arange(1, n)
    if n > 1:
        yt, ytbar = _beta_pair(b2 * kt, b2 * (params.n1 + params.n2 - 2 * n + kt + 1), stream)
    else:
        yt = ytbar = np.empty(0)
    return JacobiAngles(np.sqrt(y), np.sqrt(ybar), np.sqrt(yt), np.sqrt(ytbar))


def _m_parts(angles: JacobiAngles):
    diag = angles.C * np.append(angles.St, 1.0)
    sub = angles.S[1:] * angles.Ct
    return diag, sub


def build_M(angles: JacobiAngles) -> Bidiagonal:
    """Lower bidiagonal model: diagonal ``C_k St_k``, subdiagonal ``S_{k+1} Ct_k``."""
    diag, sub = _m_parts(angles)
    return Bidiagonal(diag, sub, lower=True)


def build_W(angles: JacobiAngles) -> Bidiagonal:
    """``M`` with the subdiagonal negated; same singular values."""
    diag, sub = _m_parts(angles)
    return Bidiagonal(diag, -sub, lower=True)


def build_Z(angles: JacobiAngles) -> Bidiagonal:
    """``M`` with rows and columns reversed (upper bidiagonal).

    Row ``k`` carries ``C_{n+1-k} St_{n+1-k}`` on the diagonal and
    ``S_{n+1-k} Ct_{n-k}`` above it, so the top edge of the spectrum is
    resolved near the first rows.
    """
    diag, sub = _m_parts(angles)
    return Bidiagonal(diag[::-1].copy(), sub[::-1].copy(), lower=False)


def spectral_edges(gamma1: float, gamma2: float):
    """Edges ``(Lambda_-, Lambda_+)`` of the limiting density for ratios ``n1/n, n2/n``."""
    tot = gamma1 + gamma2
    if not (gamma1 > 0 and gamma2 > 0 and tot >= 1):
        raise ParameterError(f"invalid ratios gamma1={gamma1}, gamma2={gamma2}")
    left = math.sqrt(gamma1 * (tot - 1)) / tot
    right = math.sqrt(gamma2) / tot
    return (left - right) ** 2, (left + right) ** 2


def scaling_constants(params: JacobiParams) -> ScalingConstants:
    """Soft-edge constants ``c, s, ct, st``, the edges and ``m_n``, ``alpha_n``.

    ``m_n = [c s ct st sqrt(n1+n2) / |D|]^(2/3)`` with
    ``D = ct st (c^2 - s^2) + c s (ct^2 - st^2)`` (D is negative in the usual
    regime; only its magnitude enters) and ``alpha_n = m_n^2 / (c s ct st)``.
    """
    n, n1, n2 = params.n, params.n1, params.n2
    tot = n1 + n2
    if tot <= n:
        raise ParameterError("soft-edge scaling needs n1 + n2 > n")
    c, s = math.sqrt(n1 / tot), math.sqrt(n2 / tot)
    ct, st = math.sqrt(n / tot), math.sqrt((tot - n) / tot)
    lam_plus = (c * st + s * ct) ** 2
    lam_minus = (c * st - s * ct) ** 2
    prod = c * s * ct * st
    denom = ct * st * (c * c - s * s) + c * s * (ct * ct - st * st)
    if abs(denom) <= 1e-12:
        raise DegenerateScalingError(
            f"soft-edge scaling denominator vanishes (D = {denom:.3e}) for {params}", denominator=denom
        )
    m_n = (prod * math.sqrt(tot) / abs(denom)) ** (2.0 / 3.0)
    return ScalingConstants(c, s, ct, st, lam_plus, lam_minus, m_n, m_n * m_n / prod, denom)


def hard_edge_scale(params: JacobiParams) -> float:
    return params.n * params.n2


# -- limiting density ---------------------------------------------------------

def _density_shape_theta(theta, lo, hi):
    # x = lo + (hi - lo) sin^2(theta/2) removes both square-root endpoints
    width = hi - lo
    x = lo + width * np.sin(theta / 2) ** 2
    return width * width * np.sin(theta) ** 2 / 4 / (x * (1 - x))


@lru_cache(maxsize=64)
def _shape_integral(gamma1: float, gamma2: float) -> float:
    lo, hi = spectral_edges(gamma1, gamma2)
    val, _ = integrate.quad(_density_shape_theta, 0.0, math.pi, args=(lo, hi), epsabs=1e-14, epsrel=1e-13)
    return val


def density_normalization(gamma1: float, gamma2: float) -> float:
    """Integral of the density with the prefactor ``2 pi / (gamma1 + gamma2)``.

    That prefactor does not give unit mass (the total is
    ``4 pi^2 / (gamma1 + gamma2)^2``); :func:`density_rho` divides by the
    numerical integral instead.
    """
    return 2 * math.pi / (gamma1 + gamma2) * _shape_integral(float(gamma1), float(gamma2))


def density_rho(x, gamma1: float, gamma2: float):
    """Limiting eigenvalue density, renormalized to unit mass; zero outside the support."""
    lo, hi = spectral_edges(gamma1, gamma2)
    x = np.asarray(x, dtype=float)
    inside = (x > lo) & (x < hi)
    xs = np.where(inside, x, 0.5 * (lo + hi))
    shape = np.sqrt(np.clip((hi - xs) * (xs - lo), 0, None)) / (xs * (1 - xs))
    out = np.where(inside, shape / _shape_integral(float(gamma1), float(gamma2)), 0.0)
    return float(out) if out.ndim == 0 else out


def density_cdf(x, gamma1: float, gamma2: float):
    """Distribution function of :func:`density_rho`."""
    lo, hi = spectral_edges(gamma1, gamma2)
    total = _shape_integral(float(gamma1), float(gamma2))

    def one(v):
        if v <= lo:
            return 0.0
        if v >= hi:
            return 1.0
        theta = 2 * math.asin(math.sqrt((v - lo) / (hi - lo)))
        val, _ = integrate.quad(_density_shape_theta, 0.0, theta, args=(lo, hi), epsabs=1e-14, epsrel=1e-12)
        return min(1.0, val / total)

    arr = np.asarray(x, dtype=float)
    out = np.vectorize(one, otypes=[float])(arr)
    return float(out) if out.ndim == 0 else out


# -- soft edge ------------------------------------------------------------------

def _angles_from(params, source):
    if isinstance(source, JacobiAngles):
        if source.n != params.n:
            raise ParameterError("angle arrays do not match n")
        return source
    if isinstance(source, RngStream):
        return sample_angles(params, source)
    raise TypeError(f"expected RngStream or JacobiAngles, got {type(source).__name__}")


def build_Hn(params: JacobiParams, source) -> SymTridiagonal:
    """Soft-edge matrix ``alpha_n (Lambda_+ I - Z Z^T)``.

    Written in the drift/noise form: diagonal ``2 m^2 + (m^2/p)(c^2 st^2 +
    s^2 ct^2 - (ZZ^T)_kk)`` and off-diagonal ``-m^2 + (m^2/p)(p -
    (ZZ^T)_{k,k+1})`` with ``p = c s ct st``.  ``source`` is a stream or
    a pre-drawn :class:`JacobiAngles`.
    """
    sc = scaling_constants(params)
    z = build_Z(_angles_from(params, source))
    t = gram(z)
    m2, p = sc.m_n**2, sc.cs_prod
    base = sc.c**2 * sc.st**2 + sc.s**2 * sc.ct**2
    diag = 2 * m2 + (m2 / p) * (base - t.diag)
    off = -m2 + (m2 / p) * (p - t.offdiag)
    return SymTridiagonal(diag, off)


def _check_k(params, k):
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= params.n:
        raise ParameterError(f"k must be an integer in [1, n={params.n}], got {k!r}")
    return int(k)


def soft_edge_sample(params: JacobiParams, k: int, source) -> np.ndarray:
    """``alpha_n (Lambda_+ - lambda_l)`` for the ``k`` largest eigenvalues, ascending.

    Requires ``n2 > n``: the upper edge is soft only when ``n2 / n`` stays
    above one.
    """
    k = _check_k(params, k)
    if not params.n2 > params.n:
        raise ParameterError(f"upper soft edge needs n2 > n, got n2={params.n2}, n={params.n}")
    sc = scaling_constants(params)
    m = build_M(_angles_from(params, source))
    top = extreme_eigenvalues(gram(m), SpectrumQuery(k, "largest", 1e-15))
    return sc.alpha_n * (sc.lambda_plus - top)


def hard_edge_sample(params: JacobiParams, k: int, source) -> np.ndarray:
    """``n n2 lambda_l`` for the ``k`` smallest eigenvalues, ascending."""
    k = _check_k(params, k)
    w = build_W(_angles_from(params, source))
    sv = singular_values(w, k, "smallest")
    return hard_edge_scale(params) * sv * sv


def sample_eigenvalues(params: JacobiParams, source) -> np.ndarray:
    """All eigenvalues of ``M M^T`` (ascending), from squared singular values of ``M``."""
    sv = singular_values(build_M(_angles_from(params, source)))
    return sv * sv


# -- drift / variance diagnostic ---------------------------------------------------

@dataclass(frozen=True)
class DriftReport:
    """Per-step moments of the soft-edge increment process.

    ``mean_scaled = m_n E[dY_k]`` should approach ``k / m_n``,
    ``var_scaled = m_n Var[dY_k]`` should approach ``4 / beta`` and
    ``fourth_scaled = m_n E[dY_k^4]`` should vanish. ``cumulative`` is the
    running sum of ``E[dY_k]`` and tracks ``x^2 / 2`` at ``x = k / m_n``.
    """

    k: np.ndarray
    x: np.ndarray
    mean_scaled: np.ndarray
    var_scaled: np.ndarray
    fourth_scaled: np.ndarray
    cumulative: np.ndarray
    m_n: float
    beta: float
    trials: int

    @property
    def drift_profile(self) -> np.ndarray:
        return self.x**2 / 2

    @property
    def predicted_variance(self) -> float:
        return 4.0 / self.beta

    def variance_ratio(self) -> float:
        """Pooled ``m_n Var`` over all steps divided by ``4 / beta``."""
        return float(np.mean(self.var_scaled) / self.predicted_variance)

    def drift_error(self, x_max: float = None) -> float:
        """``max |cumulative - x^2/2|`` over ``x <= x_max``, relative to ``x_max^2 / 2``."""
        x_max = float(self.x[-1]) if x_max is None else x_max
        sel = self.x <= x_max + 1e-12
        return float(np.max(np.abs(self.cumulative[sel] - self.drift_profile[sel])) / (x_max**2 / 2))

    def rows(self):
        for i in range(self.k.size):
            yield {
                "k": int(self.k[i]),
                "x": float(self.x[i]),
                "mean_scaled": float(self.mean_scaled[i]),
                "predicted_mean": float(self.x[i]),
                "var_scaled": float(self.var_scaled[i]),
                "predicted_var": self.predicted_variance,
                "fourth_scaled": float(self.fourth_scaled[i]),
                "cumulative": float(self.cumulative[i]),
                "drift_profile": float(self.drift_profile[i]),
            }


def _increments(params, sc, angles, kmax, kind):
    n = params.n
    m, p = sc.m_n, sc.cs_prod
    base = sc.c**2 * sc.st**2 + sc.s**2 * sc.ct**2
    C, S, Ct = angles.C, angles.S, angles.Ct
    St = np.append(angles.St, 1.0)
    k = np.arange(1, kmax + 1)
    i = n - k - 1  # 0-based position of index n - k
    if kind == "tilde":
        d1 = (m / p) * (base - S[i] ** 2 * Ct[i] ** 2 - C[i] ** 2 * St[i] ** 2)
        d2 = (2 * m / p) * (p - C[i] * S[i] * Ct[i] * St[i])
    elif kind == "shifted":
        d1 = (m / p) * (base - S[i + 1] ** 2 * Ct[i] ** 2 - C[i] ** 2 * St[i] ** 2)
        d2 = (2 * m / p) * (p - C[i] * S[i] * Ct[i] * St[i - 1])
    elif kind == "matrix":
        t = gram(build_Z(angles))
        d1 = (m / p) * (base - t.diag[:kmax])
        d2 = (2 * m / p) * (p - t.offdiag[:kmax])
    else:
        raise ParameterError(f"unknown increment kind {kind!r}")
    return d1 + d2


def drift_variance_diagnostic(params: JacobiParams, x_max: float, trials: int, seed: int = 0,
                              kind: str = "tilde") -> DriftReport:
    """Monte Carlo moments of the soft-edge increments on ``k <= x_max m_n``.

    ``kind`` selects the increment family: ``"tilde"`` (all angles at index
    ``n - k``; independent across ``k``), ``"shifted"`` (``S_{n-k+1}``
    and ``St_{n-k-1}`` instead of index ``n - k``) or ``"matrix"``
    (read off the entries of ``H_n``; neighbouring steps share angles).
    Trial ``t`` uses ``RngStream(seed, t)``.
    """
    if trials < 2:
        raise ParameterError("need at least two trials")
    sc = scaling_constants(params)
    kmax = min(int(math.floor(x_max * sc.m_n)), params.n - 2)
    if kmax < 1:
        raise ParameterError("x_max * m_n must be at least 1")
    incs = np.empty((trials, kmax))
    for t in range(trials):
        angles = sample_angles(params, RngStream(seed, t))
        incs[t] = _increments(params, sc, angles, kmax, kind)
    m = sc.m_n
    mean = incs.mean(axis=0)
    k = np.arange(1, kmax + 1)
    return DriftReport(
        k=k,
        x=k / m,
        mean_scaled=m * mean,
        var_scaled=m * incs.var(axis=0, ddof=1),
        fourth_scaled=m * np.mean(incs**4, axis=0),
        cumulative=np.cumsum(mean),
        m_n=m,
        beta=params.beta,
        trials=trials,
    )
