"""Seeded Monte Carlo runners.

Trial ``t`` always draws from ``RngStream(seed, t)`` and results are merged in
trial order, so output does not depend on how many workers ran it.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np

from .jacobi import (
    JacobiParams,
    hard_edge_sample,
    sample_angles,
    sample_eigenvalues,
    soft_edge_sample,
)
from .limitops import GridSpec, sae_eigenvalues, sbo_eigenvalues, sbo_inverse_kernel
from .randkit import RngStream, sample_brownian

__all__ = [
    "run_trials",
    "eigenvalue_trial",
    "angle_trial",
    "soft_edge_trial",
    "hard_edge_trial",
    "sae_trial",
    "sbo_trial",
]


def _chunk(func, seed, indices):
    return [func(RngStream(seed, int(t))) for t in indices]


def run_trials(func, trials: int, seed: int, threads: int = 1) -> np.ndarray:
    """Evaluate ``func(RngStream(seed, t))`` for ``t = 0..trials-1`` and stack the rows.

    ``func`` must be picklable when ``threads > 1`` (module-level function or
    :func:`functools.partial` of one).
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if threads <= 1 or trials == 1:
        rows = _chunk(func, seed, range(trials))
    else:
        workers = min(threads, trials)
        # contiguous blocks, several per worker for load balance
        nblocks = min(trials, 4 * workers)
        blocks = np.array_split(np.arange(trials), nblocks)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(partial(_chunk, func, seed), blocks))
        rows = [r for part in parts for r in part]
    return np.vstack([np.atleast_1d(np.asarray(r, dtype=float)) for r in rows])


def eigenvalue_trial(params: JacobiParams, stream: RngStream):
    return sample_eigenvalues(params, stream)


def angle_trial(params: JacobiParams, stream: RngStream):
    a = sample_angles(params, stream)
    return np.concatenate([a.C, a.S, a.Ct, a.St])


def soft_edge_trial(params: JacobiParams, k: int, stream: RngStream):
    return soft_edge_sample(params, k, stream)


def hard_edge_trial(params: JacobiParams, k: int, stream: RngStream):
    return hard_edge_sample(params, k, stream)


def sae_trial(beta: float, grid: GridSpec, k: int, stream: RngStream):
    path = None if math.isinf(beta) else sample_brownian(grid.length, grid.step, stream)
    return sae_eigenvalues(beta, grid, path, k)


def sbo_trial(beta: float, a: float, grid: GridSpec, k: int, stream: RngStream):
    path = None if math.isinf(beta) else sample_brownian(grid.length, grid.step, stream)
    return sbo_eigenvalues(sbo_inverse_kernel(beta, a, grid, path), k)
