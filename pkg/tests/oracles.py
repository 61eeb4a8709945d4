"""Closed-form reference values shared by the test modules."""
import numpy as np
from scipy.special import betaln

from betajacobi.jacobi import scaling_constants


def exact_tilde_drift(p, kmax):
    """``m_n E[dY_k]`` for k = 1..kmax from Beta moments (all angles at index n - k).

    Uses ``E[C S] = B(p + 1/2, q + 1/2) / B(p, q)`` for ``C^2 ~ Beta(p, q)``.
    """
    sc = scaling_constants(p)
    b2 = p.beta / 2
    m, x = sc.m_n, sc.cs_prod
    base = sc.c**2 * sc.st**2 + sc.s**2 * sc.ct**2
    j = p.n - np.arange(1, kmax + 1)
    pc, qc = b2 * (p.n1 - p.n + j), b2 * (p.n2 - p.n + j)
    pt, qt = b2 * j, b2 * (p.n1 + p.n2 - 2 * p.n + j + 1)
    ec2, ect2 = pc / (pc + qc), pt / (pt + qt)
    ecs = np.exp(betaln(pc + 0.5, qc + 0.5) - betaln(pc, qc))
    ects = np.exp(betaln(pt + 0.5, qt + 0.5) - betaln(pt, qt))
    d1 = (m / x) * (base - (1 - ec2) * ect2 - ec2 * (1 - ect2))
    d2 = (2 * m / x) * (x - ecs * ects)
    return m * (d1 + d2)
