"""Exact solver for the sparsity-constrained block subproblem.

Given the current iterate and a working set B, the block objective is a
ratio of quadratics in z = x_B with a proximal weight theta on the
numerator.  The cardinality budget is q = s - ||x_N||_0.  The solver
enumerates supports of size min(q, k) (support monotonicity makes the
smaller sizes redundant) and solves each restricted quadratic fractional
program globally.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DegenerateDenominator
from .qfp import QfpSubproblem, solve_bisection, solve_coordinate_descent

MAX_BLOCK_SIZE = 20


@dataclass
class BlockSubproblem:
    qfp: QfpSubproblem
    budget: int


def build_block_subproblem(problem, x, B, theta: float) -> BlockSubproblem:
    """Assemble the block QFP coefficients for working set B at iterate x."""
    A, C = problem.A, problem.C
    x = np.asarray(x, dtype=float)
    B = np.asarray(B, dtype=int)
    n = A.shape[0]
    mask = np.zeros(n, dtype=bool)
    mask[B] = True
    N = np.flatnonzero(~mask)
    xB = x[B]
    xN = x[N]
    k = B.size

    Qbar = A[np.ix_(B, B)] + theta * np.eye(k)
    pbar = A[np.ix_(B, N)] @ xN - theta * xB
    wbar = 0.5 * float(xN @ A[np.ix_(N, N)] @ xN) + 0.5 * theta * float(xB @ xB)
    Rbar = C[np.ix_(B, B)]
    cbar = C[np.ix_(B, N)] @ xN
    vbar = 0.5 * float(xN @ C[np.ix_(N, N)] @ xN)
    budget = int(problem.s) - int(np.count_nonzero(xN))
    if budget < 0:
        raise ValueError("iterate violates the sparsity budget outside the working set")
    qfp = QfpSubproblem(
        Q=Qbar, p=pbar, w=wbar, R=Rbar, c=cbar, v=vbar,
        lower_bound=problem.lower_bound,
    )
    return BlockSubproblem(qfp=qfp, budget=budget)


def solve_exact(sub: BlockSubproblem, method: str = "bisection") -> tuple[np.ndarray, float]:
    """Globally minimize the block QFP under ||z||_0 <= budget.

    Returns (z, value); entries off the winning support are exact zeros.
    """
    qfp = sub.qfp
    k = qfp.dim
    if k > MAX_BLOCK_SIZE:
        raise ValueError(f"block size {k} exceeds the cap of {MAX_BLOCK_SIZE}")
    q = min(sub.budget, k)
    if q == 0:
        if qfp.v <= 0:
            raise DegenerateDenominator("empty budget with nonpositive constant denominator")
        return np.zeros(k), qfp.w / qfp.v

    best_value = np.inf
    best_support: tuple[int, ...] | None = None
    best_y: np.ndarray | None = None
    for support in combinations(range(k), q):
        idx = np.asarray(support, dtype=int)
        restricted = QfpSubproblem(
            Q=qfp.Q[np.ix_(idx, idx)],
            p=qfp.p[idx],
            w=qfp.w,
            R=qfp.R[np.ix_(idx, idx)],
            c=qfp.c[idx],
            v=qfp.v,
            lower_bound=qfp.lower_bound,
        )
        if method == "bisection" and qfp.lower_bound is None:
            sol = solve_bisection(restricted)
        else:
            sol = solve_coordinate_descent(restricted)
        if sol.value < best_value:
            best_value = sol.value
            best_support = support
            best_y = sol.y

    assert best_support is not None and best_y is not None
    z = np.zeros(k)
    z[list(best_support)] = best_y
    return z, float(best_value)
