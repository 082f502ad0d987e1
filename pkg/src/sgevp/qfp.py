"""Global solvers for the m-variable quadratic fractional program.

The problem is  min_y  L(y) = (y'Qy/2 + p'y + w) / (y'Ry/2 + c'y + v)
with R positive definite, optionally with an elementwise lower bound on y.

Two routes:

* ``solve_bisection`` -- globally optimal for the unconstrained case.  After
  the substitution u = R^{1/2}y + R^{-1/2}c the objective becomes
  (u'Ou/2 + u'g + delta/2) / (|u|^2/2 + gamma/2) and the optimal value is
  the unique root of the monotone parametric function J(alpha) on
  [lambda_min(Z), lambda_min(O)).
* ``solve_coordinate_descent`` -- cyclic/random/Gauss-Southwell exact 1-D
  minimization; handles the lower bound, converges to a coordinate-wise
  minimum.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import linalg
from .errors import (
    DegenerateDenominator,
    NonPositiveGamma,
    ShiftTooClose,
    UnboundedBelow,
)
from .fractional1d import solve_1d_core

# gamma == 0 (within this relative slack) is the homogeneous/degenerate case
# reached when the fixed coordinates are all zero; genuinely negative gamma
# is rejected.
_GAMMA_SLACK = 1e-12


class Certificate(enum.Enum):
    BISECTION_ROOT = "BisectionRoot"
    BOUNDARY_LOWER = "BoundaryLower"
    BOUNDARY_UPPER = "BoundaryUpper"
    COORDINATE_WISE_MIN = "CoordinateWiseMin"


class CdOrder(enum.Enum):
    CYCLIC = "cyclic"
    RANDOM = "random"
    GAUSS_SOUTHWELL = "gauss-southwell"


@dataclass
class QfpSubproblem:
    Q: np.ndarray
    p: np.ndarray
    w: float
    R: np.ndarray
    c: np.ndarray
    v: float
    lower_bound: float | None = None

    def __post_init__(self):
        self.Q = linalg.symmetrize(self.Q)
        self.R = linalg.symmetrize(self.R)
        self.p = np.asarray(self.p, dtype=float)
        self.c = np.asarray(self.c, dtype=float)
        self.w = float(self.w)
        self.v = float(self.v)

    @property
    def dim(self) -> int:
        return self.Q.shape[0]

    def numerator(self, y: np.ndarray) -> float:
        return float(0.5 * y @ self.Q @ y + self.p @ y + self.w)

    def denominator(self, y: np.ndarray) -> float:
        return float(0.5 * y @ self.R @ y + self.c @ y + self.v)

    def value(self, y: np.ndarray) -> float:
        den = self.denominator(y)
        if den <= 0:
            raise DegenerateDenominator(f"denominator {den:.6g}")
        return self.numerator(y) / den

    def validate(self) -> None:
        eig_R = linalg.sym_eig(self.R)
        if eig_R.values[0] <= linalg.pd_tol(self.R):
            raise linalg.NotPositiveDefinite(float(eig_R.values[0]))
        gamma = self._gamma(eig_R)
        scale = _GAMMA_SLACK * (1.0 + abs(2.0 * self.v))
        if gamma < -scale:
            raise NonPositiveGamma(f"gamma = {gamma:.6g} <= 0")

    def _gamma(self, eig_R: linalg.EigDecomposition) -> float:
        half = (eig_R.vectors / np.sqrt(eig_R.values)) @ eig_R.vectors.T
        return float(2.0 * self.v - np.sum((half @ self.c) ** 2))


@dataclass
class QfpSolution:
    y: np.ndarray
    value: float
    alpha_star: float | None
    iterations: int
    certificate: Certificate


class ReducedForm(NamedTuple):
    O: np.ndarray
    g: np.ndarray
    gamma: float
    delta: float
    Z: np.ndarray | None
    R_inv_sqrt: np.ndarray


def assemble_reduced(q: QfpSubproblem) -> ReducedForm:
    """Change of variables of Theorem-1 style: O, g, gamma, delta and Z.

    Z is None in the degenerate gamma == 0 case (it would need a division
    by sqrt(gamma)).
    """
    W = linalg.inv_sqrt(q.R)  # R^{-1/2}
    O = linalg.symmetrize(W @ q.Q @ W)
    Rinv_c = W @ (W @ q.c)
    g = W @ q.p - W @ (q.Q @ Rinv_c)
    gamma = float(2.0 * q.v - np.sum((W @ q.c) ** 2))
    delta = float(Rinv_c @ (q.Q @ Rinv_c) - 2.0 * (Rinv_c @ q.p) + 2.0 * q.w)
    scale = _GAMMA_SLACK * (1.0 + abs(2.0 * q.v))
    if gamma < -scale:
        raise NonPositiveGamma(f"gamma = {gamma:.6g} <= 0")
    if gamma <= scale:
        return ReducedForm(O=O, g=g, gamma=0.0, delta=delta, Z=None, R_inv_sqrt=W)
    m = q.dim
    Z = np.empty((m + 1, m + 1))
    Z[:m, :m] = O
    Z[:m, m] = g / math.sqrt(gamma)
    Z[m, :m] = g / math.sqrt(gamma)
    Z[m, m] = delta / gamma
    return ReducedForm(O=O, g=g, gamma=gamma, delta=delta, Z=Z, R_inv_sqrt=W)


def j_alpha(
    eig_O: linalg.EigDecomposition,
    g: np.ndarray,
    gamma: float,
    delta: float,
    alpha: float,
) -> float:
    """Parametric value J(alpha) = delta/2 - alpha*gamma/2 - sum a_i^2/(d_i-alpha)/2."""
    d = eig_O.values
    if d[0] - alpha < 0.5 * linalg.shift_guard(float(d[0])):
        raise ShiftTooClose(f"alpha {alpha:.6g} not below smallest eigenvalue {d[0]:.6g}")
    a = eig_O.vectors.T @ g
    return float(0.5 * delta - 0.5 * alpha * gamma - 0.5 * np.sum(a * a / (d - alpha)))


def _recover_y(q: QfpSubproblem, red: ReducedForm, u: np.ndarray) -> np.ndarray:
    return red.R_inv_sqrt @ (u - red.R_inv_sqrt @ q.c)


def default_bisection_tol(lo: float, ub: float) -> float:
    return 1e-10 * max(1.0, ub - lo)


def solve_bisection(q: QfpSubproblem, tol: float | None = None) -> QfpSolution:
    """Globally minimize the unconstrained QFP by root-finding on J(alpha)."""
    if q.lower_bound is not None:
        raise ValueError("bisection does not handle bound constraints; use coordinate descent")
    red = assemble_reduced(q)
    eig_O = linalg.sym_eig(red.O)
    d = eig_O.values
    a = eig_O.vectors.T @ red.g
    a2 = a * a
    d_min = float(d[0])
    guard = linalg.shift_guard(d_min)
    ub_alpha = d_min - guard
    zero_tol = 1e-12 * (1.0 + abs(red.delta))
    tiny = 1e-13 * (1.0 + float(np.linalg.norm(red.O, "fro")))

    def J(alpha: float) -> float:
        return float(
            0.5 * red.delta - 0.5 * alpha * red.gamma - 0.5 * np.sum(a2 / (d - alpha))
        )

    if red.gamma == 0.0 and np.linalg.norm(red.g) <= tiny and abs(red.delta) <= tiny:
        # Fully homogeneous ratio: a plain generalized eigenvalue problem,
        # minimized by the bottom eigenvector.
        u = eig_O.vectors[:, 0]
        y = _recover_y(q, red, u)
        return QfpSolution(
            y=y, value=q.value(y), alpha_star=d_min, iterations=0,
            certificate=Certificate.BOUNDARY_UPPER,
        )

    if red.Z is not None:
        lo = float(np.linalg.eigvalsh(red.Z)[0])
        lo = min(lo, ub_alpha)
    else:
        # gamma == 0 with a nonzero affine part: J still decreases and tends
        # to delta/2 > 0 as alpha -> -inf; expand the bracket downward.
        lo = ub_alpha - max(1.0, abs(ub_alpha))
        step = max(1.0, abs(ub_alpha))
        expansions = 0
        while J(lo) < 0.0:
            step *= 2.0
            lo -= step
            expansions += 1
            if expansions > 200:
                raise UnboundedBelow("no lower bracket for the parametric root")

    if tol is None:
        tol = default_bisection_tol(lo, ub_alpha)

    J_lo = J(lo)
    J_ub = J(ub_alpha)
    iterations = 0

    if J_ub >= -zero_tol:
        # Case (a): J nonnegative on the whole bracket; the infimum is
        # lambda_min(O), approached along the bottom eigenvector.
        alpha_star = ub_alpha
        certificate = Certificate.BOUNDARY_UPPER
    elif J_lo <= zero_tol:
        # Case (b): the root sits at (or below) the lower bound.
        alpha_star = lo
        certificate = Certificate.BOUNDARY_LOWER
    else:
        lb_, ub_ = lo, ub_alpha
        while ub_ - lb_ > tol:
            mid = 0.5 * (lb_ + ub_)
            iterations += 1
            if J(mid) > 0.0:
                lb_ = mid
            else:
                ub_ = mid
        alpha_star = 0.5 * (lb_ + ub_)
        certificate = Certificate.BISECTION_ROOT

    u = linalg.solve_shifted(eig_O, min(alpha_star, ub_alpha), red.g)
    y = _recover_y(q, red, u)
    den_y = q.denominator(y)
    # den_y can be zero when gamma == 0 and g == 0 (u = 0); the eigenvector
    # escape below then supplies the point that attains the infimum.
    value = q.numerator(y) / den_y if den_y > 0 else math.inf
    if certificate is Certificate.BOUNDARY_UPPER:
        # The infimum may only be approached at infinity; try escaping along
        # the bottom eigenvector and keep the better point.
        scale = 1e8 * max(1.0, float(np.linalg.norm(u)))
        u_far = u + scale * eig_O.vectors[:, 0]
        y_far = _recover_y(q, red, u_far)
        value_far = q.value(y_far)
        if value_far < value:
            y, value = y_far, value_far
    if not math.isfinite(value):
        raise DegenerateDenominator("no feasible point with positive denominator")
    return QfpSolution(
        y=y, value=value, alpha_star=alpha_star, iterations=iterations,
        certificate=certificate,
    )


def projected_gradient(q: QfpSubproblem, y: np.ndarray) -> np.ndarray:
    """Gradient of L at y, projected against the active lower bound."""
    y = np.asarray(y, dtype=float)
    den = q.denominator(y)
    if den <= 0:
        raise DegenerateDenominator(f"denominator {den:.6g}")
    num = q.numerator(y)
    grad_num = q.Q @ y + q.p
    grad_den = q.R @ y + q.c
    grad = (grad_num * den - num * grad_den) / (den * den)
    if q.lower_bound is not None:
        at_bound = y <= q.lower_bound
        grad = np.where(at_bound, np.minimum(0.0, grad), grad)
    return grad


def _cd_start(q: QfpSubproblem) -> np.ndarray:
    lb = q.lower_bound
    if lb is None or lb <= 0.0:
        y0 = np.zeros(q.dim)
    else:
        y0 = np.full(q.dim, lb)
    if q.denominator(y0) > 0:
        return y0
    # Denominator vanishes at the natural start (gamma == 0 case); fall back
    # to the bottom generalized eigenvector of (Q, R), clamped to the bound.
    import scipy.linalg

    _, vecs = scipy.linalg.eigh(q.Q, q.R, subset_by_index=[0, 0])
    y0 = vecs[:, 0]
    if lb is not None:
        y0 = np.maximum(np.abs(y0), lb) if lb >= 0 else np.maximum(y0, lb)
    if q.denominator(y0) <= 0:
        y0 = np.ones(q.dim) if lb is None else np.maximum(np.ones(q.dim), lb)
    return y0


def solve_coordinate_descent(
    q: QfpSubproblem,
    order: CdOrder | str = CdOrder.CYCLIC,
    y0: np.ndarray | None = None,
    max_sweeps: int = 200,
    obj_tol: float | None = None,
    rng: np.random.Generator | None = None,
) -> QfpSolution:
    """Exact coordinatewise minimization of L, optionally bounded below."""
    order = CdOrder(order)
    m = q.dim
    y = _cd_start(q) if y0 is None else np.array(y0, dtype=float)
    lb = q.lower_bound
    if lb is not None and np.any(y < lb - 1e-12):
        raise ValueError("y0 violates the lower bound")
    den = q.denominator(y)
    if den <= 0:
        raise DegenerateDenominator(f"denominator {den:.6g} at start")
    num = q.numerator(y)
    if obj_tol is None:
        obj_tol = 1e-12 * (1.0 + abs(num / den))
    if order is CdOrder.RANDOM and rng is None:
        rng = np.random.default_rng(0)

    Qy = q.Q @ y + q.p
    Ry = q.R @ y + q.c
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        f_before = num / den
        if order is CdOrder.CYCLIC:
            coords = range(m)
        elif order is CdOrder.RANDOM:
            coords = rng.integers(0, m, size=m)
        else:
            coords = [None] * m  # resolved per-step below
        for pick in coords:
            if pick is None:
                pg = projected_gradient(q, y)
                i = int(np.argmax(np.abs(pg)))  # argmax, ties -> lowest index
            else:
                i = int(pick)
            lower = -math.inf if lb is None else lb - y[i]
            try:
                beta, val = solve_1d_core(
                    float(q.Q[i, i]), float(Qy[i]), num,
                    float(q.R[i, i]), float(Ry[i]), den, lower,
                )
            except (UnboundedBelow, DegenerateDenominator):
                # no attained minimizer along this coordinate (tail limit or
                # a candidate on the denominator singularity): skip the move
                continue
            if beta == 0.0 or val >= num / den:
                continue
            y[i] += beta
            Qy += beta * q.Q[:, i]
            Ry += beta * q.R[:, i]
            num = q.numerator(y)
            den = q.denominator(y)
            if den <= 0:
                raise DegenerateDenominator(f"denominator {den:.6g}")
        if f_before - num / den < obj_tol:
            break
    return QfpSolution(
        y=y, value=num / den, alpha_star=None, iterations=sweeps,
        certificate=Certificate.COORDINATE_WISE_MIN,
    )
