"""Empirical distributions, two-sample KS distance, quantiles and histogram metrics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ContractError, ParameterError

__all__ = [
    "EmpiricalDistribution",
    "ks_two_sample",
    "quantiles",
    "Histogram",
    "histogram",
    "l1_density_distance",
]


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample; construct with :meth:`from_samples` or directly from any array."""

    samples: np.ndarray

    def __post_init__(self):
        x = np.sort(np.asarray(self.samples, dtype=float).ravel())
        if x.size == 0:
            raise ParameterError("empirical distribution needs at least one sample")
        if np.any(np.isnan(x)):
            raise ParameterError("samples contain NaN")
        object.__setattr__(self, "samples", x)

    @classmethod
    def from_samples(cls, samples) -> "EmpiricalDistribution":
        return cls(samples)

    @property
    def count(self) -> int:
        return self.samples.size

    def ecdf(self, x):
        """Fraction of samples ``<= x``."""
        return np.searchsorted(self.samples, x, side="right") / self.count


def _as_dist(d) -> EmpiricalDistribution:
    return d if isinstance(d, EmpiricalDistribution) else EmpiricalDistribution(d)


def ks_two_sample(a, b) -> float:
    """``sup_x |F_a(x) - F_b(x)|``, evaluated at every jump of either ECDF."""
    a, b = _as_dist(a), _as_dist(b)
    pts = np.concatenate([a.samples, b.samples])
    return float(np.max(np.abs(a.ecdf(pts) - b.ecdf(pts))))


def quantiles(d, probs) -> np.ndarray:
    """Order-statistic quantiles with linear interpolation (position ``p (n - 1)``)."""
    d = _as_dist(d)
    p = np.atleast_1d(np.asarray(probs, dtype=float))
    if np.any(np.isnan(p)) or np.any((p < 0) | (p > 1)):
        raise ParameterError("probabilities must lie in [0, 1]")
    pos = p * (d.count - 1)
    lo = np.floor(pos).astype(int)
    hi = np.minimum(lo + 1, d.count - 1)
    frac = pos - lo
    x = d.samples
    return x[lo] + frac * (x[hi] - x[lo])


@dataclass(frozen=True)
class Histogram:
    """Bin edges and the fraction of samples in each bin (sums to 1 when nothing falls outside)."""

    edges: np.ndarray
    mass: np.ndarray

    def __post_init__(self):
        if len(self.edges) != len(self.mass) + 1:
            raise ContractError("need one more edge than bins")


def histogram(samples, bins: int, range_=None) -> Histogram:
    """Unit-mass histogram; samples outside ``range_`` count towards the total but no bin."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ParameterError("cannot histogram an empty sample")
    counts, edges = np.histogram(x, bins=bins, range=range_)
    return Histogram(edges, counts / x.size)


def l1_density_distance(h: Histogram, rho=None, support=None, cdf=None, points: int = 64) -> float:
    """``sum_bins |mass(bin) - int_bin rho|`` plus the density mass not covered by any bin.

    Pass ``cdf`` for exact bin integrals, otherwise ``rho`` is integrated with
    Gauss-Legendre nodes per bin. ``support = (lo, hi)`` bounds where
    ``rho`` lives; its total mass over ``support`` is taken to be 1.
    """
    edges = h.edges
    if cdf is not None:
        lo, hi = support if support is not None else (-np.inf, np.inf)
        f = np.asarray(cdf(np.clip(edges, lo, hi)), dtype=float)
        binmass = np.diff(f)
        covered = f[-1] - f[0]
    else:
        if rho is None or support is None:
            raise ParameterError("need either cdf or both rho and support")
        lo, hi = support
        gx, gw = np.polynomial.legendre.leggauss(points)
        a = np.clip(edges[:-1], lo, hi)
        b = np.clip(edges[1:], lo, hi)
        half = 0.5 * (b - a)
        nodes = 0.5 * (a + b)[:, None] + half[:, None] * gx[None, :]
        binmass = np.sum(gw[None, :] * np.asarray(rho(nodes), dtype=float), axis=1) * half
        covered = binmass.sum()
    uncovered = max(0.0, 1.0 - float(covered))
    return float(np.sum(np.abs(h.mass - binmass)) + uncovered + max(0.0, 1.0 - h.mass.sum()))
