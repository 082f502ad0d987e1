import numpy as np
import pytest

from sgevp import linalg
from sgevp.errors import (
    DuplicateIndex,
    IndexOutOfRange,
    NonFinite,
    NotPositiveDefinite,
    ShiftTooClose,
)

from _util import random_spd, random_sym


def test_sym_eig_identity():
    eig = linalg.sym_eig(np.eye(3))
    assert np.allclose(eig.values, [1.0, 1.0, 1.0])
    assert np.allclose(eig.vectors.T @ eig.vectors, np.eye(3), atol=1e-10 * 3)


def test_sym_eig_diagonal_sorted():
    eig = linalg.sym_eig(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(eig.values, [1.0, 2.0, 3.0])


def test_sym_eig_reconstruction():
    rng = np.random.default_rng(0)
    M = random_sym(rng, 5)
    eig = linalg.sym_eig(M)
    recon = eig.vectors @ np.diag(eig.values) @ eig.vectors.T
    assert np.linalg.norm(recon - M) <= 1e-8 * np.linalg.norm(M)


def test_sym_eig_nonfinite():
    M = np.eye(2)
    M[0, 0] = np.nan
    with pytest.raises(NonFinite):
        linalg.sym_eig(M)


def test_inv_sqrt_identity_and_diagonal():
    assert np.allclose(linalg.inv_sqrt(np.eye(4)), np.eye(4))
    W = linalg.inv_sqrt(np.diag([4.0, 9.0]))
    assert np.allclose(W, np.diag([0.5, 1.0 / 3.0]))


def test_inv_sqrt_defining_identity_and_commutes():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((6, 4))
    M = X.T @ X + np.eye(4)
    W = linalg.inv_sqrt(M)
    assert np.linalg.norm(W @ M @ W - np.eye(4)) <= 1e-7 * 4
    assert np.linalg.norm(W @ M - M @ W) <= 1e-7 * np.linalg.norm(M)


def test_inv_sqrt_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite) as exc:
        linalg.inv_sqrt(np.diag([1.0, -2.0]))
    assert exc.value.smallest_eigenvalue == pytest.approx(-2.0)


def test_min_eigenvalue():
    assert linalg.min_eigenvalue(np.diag([-2.0, 5.0])) == pytest.approx(-2.0)
    assert linalg.min_eigenvalue(np.eye(3)) == pytest.approx(1.0)
    rng = np.random.default_rng(2)
    M = random_sym(rng, 6)
    assert linalg.min_eigenvalue(M) == pytest.approx(linalg.sym_eig(M).values[0])


def test_principal_submatrix():
    m = np.diag([1.0, 2.0, 3.0])
    assert np.allclose(linalg.principal_submatrix(m, [2, 0]), [[3.0, 0.0], [0.0, 1.0]])
    assert np.allclose(linalg.principal_submatrix(m, [0, 1, 2]), m)
    assert linalg.principal_submatrix(m, [1]).shape == (1, 1)
    with pytest.raises(IndexOutOfRange):
        linalg.principal_submatrix(m, [0, 3])
    with pytest.raises(DuplicateIndex):
        linalg.principal_submatrix(m, [1, 1])


def test_solve_shifted_diagonal():
    eig = linalg.sym_eig(np.diag([2.0, 3.0]))
    u = linalg.solve_shifted(eig, 1.0, np.array([1.0, 1.0]))
    assert np.allclose(u, [-1.0, -0.5])
    assert np.allclose(linalg.solve_shifted(eig, 1.0, np.zeros(2)), 0.0)


def test_solve_shifted_residual():
    rng = np.random.default_rng(3)
    O = random_sym(rng, 4)
    eig = linalg.sym_eig(O)
    g = rng.standard_normal(4)
    alpha = float(eig.values[0]) - 0.7
    u = linalg.solve_shifted(eig, alpha, g)
    assert np.linalg.norm((O - alpha * np.eye(4)) @ u + g) <= 1e-7 * np.linalg.norm(g)


def test_solve_shifted_guard():
    eig = linalg.sym_eig(np.diag([2.0, 3.0]))
    with pytest.raises(ShiftTooClose):
        linalg.solve_shifted(eig, 2.0, np.array([1.0, 1.0]))
    # the bracket endpoint d_min - guard must be accepted
    alpha = 2.0 - linalg.shift_guard(2.0)
    linalg.solve_shifted(eig, alpha, np.array([1.0, 1.0]))


def test_eigenvalue_interlacing():
    rng = np.random.default_rng(4)
    for _ in range(20):
        Z = random_sym(rng, 5)
        O = Z[:4, :4]
        z_vals = np.linalg.eigvalsh(Z)
        o_vals = np.linalg.eigvalsh(O)
        assert z_vals[0] <= o_vals[0] + 1e-12
        assert o_vals[0] <= z_vals[1] + 1e-12


def test_symmetrize():
    M = np.array([[1.0, 2.0], [0.0, 3.0]])
    S = linalg.symmetrize(M)
    assert np.array_equal(S, S.T)
    assert S[0, 1] == pytest.approx(1.0)
