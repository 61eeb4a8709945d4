"""Seeded random streams and the distribution samplers built on them.

Every random quantity in the package is drawn through an :class:`RngStream`.
A stream is identified by ``(seed, stream_id)``; the underlying bit generator
is Philox (counter based), so trial ``t`` of an experiment can use
``stream_id = t`` and get the same numbers no matter how trials are scheduled.

Gamma variates use the Marsaglia-Tsang squeeze/rejection method. Shapes below
one are boosted: ``G(a) = G(a + 1) * U**(1/a)``, carried out in log space so
that tiny shapes do not underflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .exceptions import ParameterError

__all__ = [
    "RngStream",
    "BrownianPath",
    "sample_gamma",
    "sample_beta",
    "beta_joint_moment",
    "sample_brownian",
    "refine_brownian",
    "extend_brownian",
]

_MAX_SEED = 2**64


class RngStream:
    """A reproducible random stream keyed by ``(seed, stream_id)``.

    Two streams built from the same pair produce the same sequence for the
    same sequence of calls. A stream is stateful and must not be shared
    between threads; derive one per worker with :meth:`substream`.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        for name, value in (("seed", seed), ("stream_id", stream_id)):
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ParameterError(f"{name} must be an integer, got {value!r}")
            if not 0 <= int(value) < _MAX_SEED:
                raise ParameterError(f"{name} must lie in [0, 2**64), got {value}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence([self.seed, self.stream_id])
        self.generator = np.random.Generator(np.random.Philox(ss))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def substream(self, index: int) -> "RngStream":
        """Independent stream derived from this one's seed (ignores current state)."""
        return RngStream(self.seed, index)

    def normal(self, size=None, scale=1.0):
        return self.generator.normal(0.0, scale, size)

    def uniform(self, size=None):
        return self.generator.random(size)


@dataclass(frozen=True)
class BrownianPath:
    """Brownian motion sampled on the grid ``0, h, 2h, ...``.

    ``values[0]`` is exactly zero.
    """

    step: float
    values: np.ndarray

    def __len__(self):
        return len(self.values)

    @property
    def grid(self) -> np.ndarray:
        return self.step * np.arange(len(self.values))

    @property
    def length(self) -> float:
        return self.step * (len(self.values) - 1)

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values)


def _check_shape(shape, name="shape"):
    arr = np.asarray(shape, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise ParameterError(f"{name} must be positive and finite, got {shape!r}")
    return arr


def _log_gamma_variates(shape, stream: RngStream, size=None) -> np.ndarray:
    """Logarithms of standard Gamma(shape) variates."""
    alpha = np.broadcast_to(_check_shape(shape), size if size is not None else np.shape(shape))
    alpha = np.array(alpha, dtype=float).ravel()
    boost = alpha < 1.0
    a = np.where(boost, alpha + 1.0, alpha)
    d = a - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)

    out = np.empty_like(a)
    pending = np.arange(a.size)
    while pending.size:
        x = stream.normal(pending.size)
        v = 1.0 + c[pending] * x
        positive = v > 0
        v = np.where(positive, v, 1.0) ** 3
        u = stream.uniform(pending.size)
        x2 = x * x
        squeeze = u < 1.0 - 0.0331 * x2 * x2
        with np.errstate(divide="ignore"):
            full = np.log(u) < 0.5 * x2 + d[pending] * (1.0 - v + np.log(v))
        accept = positive & (squeeze | full)
        done = pending[accept]
        out[done] = np.log(d[done] * v[accept])
        pending = pending[~accept]

    if np.any(boost):
        idx = np.flatnonzero(boost)
        u = stream.uniform(idx.size)
        # U == 0 has probability 2**-53 per draw; redraw rather than take log(0)
        while np.any(u == 0.0):
            zero = u == 0.0
            u[zero] = stream.uniform(int(zero.sum()))
        out[idx] += np.log(u) / alpha[idx]
    if size is None and np.ndim(shape) == 0:
        return out[0]
    return out.reshape(size if size is not None else np.shape(shape))


def sample_gamma(shape, stream: RngStream, size=None):
    """Draw from Gamma(shape, scale=1).

    ``shape`` may be a scalar or an array; ``size`` broadcasts it.
    """
    return np.exp(_log_gamma_variates(shape, stream, size))


def _beta_pair(p, q, stream: RngStream, size=None):
    """Return ``(Y, 1 - Y)`` for ``Y ~ Beta(p, q)``, both computed without cancellation.

    Draws that round to exactly 0 or 1 in floating point are redrawn.
    """
    p = _check_shape(p, "p")
    q = _check_shape(q, "q")
    if size is None:
        size = np.broadcast_shapes(p.shape, q.shape)
    p = np.broadcast_to(p, size).ravel()
    q = np.broadcast_to(q, size).ravel()
    y = np.empty(p.size)
    ybar = np.empty(p.size)
    pending = np.arange(p.size)
    while pending.size:
        lx = _log_gamma_variates(p[pending], stream, (pending.size,))
        ly = _log_gamma_variates(q[pending], stream, (pending.size,))
        t = lx - ly
        b, bbar = expit(t), expit(-t)
        good = (b > 0.0) & (bbar > 0.0) & (b < 1.0) & (bbar < 1.0)
        y[pending[good]] = b[good]
        ybar[pending[good]] = bbar[good]
        pending = pending[~good]
    return y.reshape(size), ybar.reshape(size)


def sample_beta(p, q, stream: RngStream, size=None):
    """Draw from Beta(p, q) as ``X / (X + Y)`` with independent Gamma variates.

    The result lies strictly inside (0, 1).
    """
    y, _ = _beta_pair(p, q, stream, size)
    if y.ndim == 0:
        return float(y)
    return y


def beta_joint_moment(p: float, q: float, i: int, j: int) -> float:
    """Exact ``E[Y**i * (1 - Y)**j]`` for ``Y ~ Beta(p, q)``.

    Rising products: ``p^(i) q^(j) / (p + q)^(i + j)``.
    """
    if not (p > 0 and q > 0):
        raise ParameterError(f"Beta parameters must be positive, got p={p}, q={q}")
    if i < 0 or j < 0 or int(i) != i or int(j) != j:
        raise ParameterError("moment orders must be non-negative integers")
    num = math.prod(p + r for r in range(int(i))) * math.prod(q + r for r in range(int(j)))
    den = math.prod(p + q + r for r in range(int(i + j)))
    return num / den


def _grid_points(length: float, step: float) -> int:
    if not (length > 0 and step > 0 and math.isfinite(length) and math.isfinite(step)):
        raise ParameterError(f"need length > 0 and step > 0, got {length}, {step}")
    if step > length * (1 + 1e-12):
        raise ParameterError(f"step {step} exceeds length {length}")
    return int(math.ceil(length / step - 1e-9)) + 1


def sample_brownian(length: float, step: float, stream: RngStream) -> BrownianPath:
    """Brownian path on ``{0, h, ..., ceil(length/h) h}`` with N(0, h) increments."""
    npts = _grid_points(length, step)
    values = np.empty(npts)
    values[0] = 0.0
    np.cumsum(stream.normal(npts - 1, scale=math.sqrt(step)), out=values[1:])
    return BrownianPath(float(step), values)


def refine_brownian(path: BrownianPath, stream: RngStream) -> BrownianPath:
    """Halve the step by Brownian-bridge interpolation; old grid values are kept."""
    h = path.step / 2
    mids = 0.5 * (path.values[:-1] + path.values[1:]) + stream.normal(len(path) - 1, scale=math.sqrt(h / 2))
    values = np.empty(2 * len(path) - 1)
    values[0::2] = path.values
    values[1::2] = mids
    return BrownianPath(h, values)


def extend_brownian(path: BrownianPath, length: float, stream: RngStream) -> BrownianPath:
    """Continue ``path`` with fresh increments until it covers ``[0, length]``."""
    npts = _grid_points(length, path.step)
    extra = npts - len(path)
    if extra <= 0:
        return path
    tail = path.values[-1] + np.cumsum(stream.normal(extra, scale=math.sqrt(path.step)))
    return BrownianPath(path.step, np.concatenate([path.values, tail]))
