"""Shared random-instance builders for the test suite."""

import numpy as np

from sgevp.decomposition import ProblemInstance
from sgevp.qfp import QfpSubproblem


def random_sym(rng, n, scale=1.0):
    M = rng.standard_normal((n, n)) * scale
    return 0.5 * (M + M.T)


def random_spd(rng, n, ridge=0.5):
    G = rng.standard_normal((n, n))
    return G @ G.T / n + ridge * np.eye(n)


def random_problem(rng, n, s, lower_bound=None):
    return ProblemInstance(
        A=random_sym(rng, n),
        C=random_spd(rng, n),
        s=s,
        lower_bound=lower_bound,
    )


def random_qfp(rng, m, gamma_min=0.1, lower_bound=None):
    """Random instance with a strictly positive denominator (gamma > 0)."""
    R = random_spd(rng, m)
    c = rng.standard_normal(m)
    gamma = gamma_min + abs(rng.standard_normal())
    # v chosen so that gamma = 2v - ||R^{-1/2}c||^2 is the drawn value.
    v = 0.5 * (float(c @ np.linalg.solve(R, c)) + gamma)
    return QfpSubproblem(
        Q=random_sym(rng, m),
        p=rng.standard_normal(m),
        w=rng.standard_normal(),
        R=R,
        c=c,
        v=v,
        lower_bound=lower_bound,
    )
