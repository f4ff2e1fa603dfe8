import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrelax import linalg
from qrelax.errors import InvalidMatrix, NotPsd


def rand_sym(rng, n, scale=5.0):
    A = rng.normal(size=(n, n)) * scale
    return (A + A.T) / 2


class TestEigSym:
    def test_identity(self):
        w, V = linalg.eig_sym(np.eye(3))
        assert np.allclose(w, [1, 1, 1])

    def test_diagonal_ascending(self):
        w, V = linalg.eig_sym(np.diag([-2.0, 0.0, 5.0]))
        assert np.allclose(w, [-2, 0, 5])
        # eigenvectors are signed axis vectors
        assert np.allclose(np.abs(V[np.abs(V) > 0.5]), 1.0, atol=1e-12)

    def test_example1_constraint_matrix(self):
        w, _ = linalg.eig_sym(np.diag([1.0, 1.0, -1.0]))
        assert np.allclose(w, [-1, 1, 1])

    def test_reconstruction(self):
        rng = np.random.default_rng(0)
        A = rand_sym(rng, 6)
        w, V = linalg.eig_sym(A)
        err = np.linalg.norm(V @ np.diag(w) @ V.T - A)
        assert err <= 1e-10 * max(1.0, np.linalg.norm(A, "fro"))

    def test_nonfinite_rejected(self):
        with pytest.raises(InvalidMatrix):
            linalg.eig_sym(np.array([[np.nan, 0], [0, 1.0]]))

    def test_nonsquare_rejected(self):
        with pytest.raises(InvalidMatrix):
            linalg.eig_sym(np.zeros((2, 3)))


class TestSplitSigned:
    def test_example1_split(self):
        s = linalg.split_signed(np.diag([1.0, 1.0, -1.0]))
        assert s.pos_count == 2 and s.neg_count == 1
        assert s.L.shape == (2, 3) and s.M.shape == (1, 3)
        assert np.allclose(np.abs(s.M), [[0, 0, 1]])
        assert np.allclose(s.reconstruct(), np.diag([1, 1, -1]))

    def test_psd_input_empty_M(self):
        s = linalg.split_signed(np.diag([4.0, 9.0]))
        assert s.neg_count == 0 and s.M.shape == (0, 2)
        assert np.allclose(s.L.T @ s.L, np.diag([4.0, 9.0]))

    def test_random_indefinite_reconstructs(self):
        rng = np.random.default_rng(7)
        A = rand_sym(rng, 4)
        s = linalg.split_signed(A)
        err = np.linalg.norm(s.reconstruct() - A, "fro")
        assert err <= 1e-8 * max(1.0, np.linalg.norm(A, "fro"))

    def test_rows_ordered_by_magnitude(self):
        s = linalg.split_signed(np.diag([3.0, 1.0, -4.0, -2.0]))
        assert np.allclose(np.linalg.norm(s.L, axis=1), [np.sqrt(3), 1.0])
        assert np.allclose(np.linalg.norm(s.M, axis=1), [2.0, np.sqrt(2)])

    def test_near_zero_dropped(self):
        s = linalg.split_signed(np.diag([1.0, 1e-14]))
        assert s.pos_count == 1


class TestPinv:
    def test_identity(self):
        assert np.allclose(linalg.pinv(np.eye(4)), np.eye(4))

    def test_singular_diagonal(self):
        assert np.allclose(linalg.pinv(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))

    def test_penrose_identities_random_psd(self):
        rng = np.random.default_rng(3)
        G = rng.normal(size=(5, 5))
        A = G @ G.T
        P = linalg.pinv(A)
        tol = 1e-8 * max(1.0, np.linalg.norm(A, "fro"))
        assert np.linalg.norm(A @ P @ A - A, "fro") <= tol
        assert np.linalg.norm(P @ A @ P - P, "fro") <= tol
        assert np.linalg.norm((A @ P) - (A @ P).T, "fro") <= tol
        assert np.linalg.norm((P @ A) - (P @ A).T, "fro") <= tol

    def test_involution_full_rank(self):
        rng = np.random.default_rng(5)
        A = rand_sym(rng, 4) + 6 * np.eye(4)
        assert np.allclose(linalg.pinv(linalg.pinv(A)), A, atol=1e-8)


class TestPsdSqrt:
    def test_diagonal(self):
        assert np.allclose(linalg.psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))

    def test_identity(self):
        assert np.allclose(linalg.psd_sqrt(np.eye(3)), np.eye(3))

    def test_random_psd_squares_back(self):
        rng = np.random.default_rng(11)
        G = rng.normal(size=(5, 5))
        A = G @ G.T
        R = linalg.psd_sqrt(A)
        assert np.allclose(R, R.T)
        assert np.linalg.norm(R @ R - A, "fro") <= 1e-8 * max(1.0, np.linalg.norm(A, "fro"))

    def test_small_negative_clamped(self):
        R = linalg.psd_sqrt(np.diag([1.0, -1e-9]))
        assert np.allclose(R, np.diag([1.0, 0.0]), atol=1e-4)

    def test_indefinite_rejected(self):
        with pytest.raises(NotPsd):
            linalg.psd_sqrt(np.diag([1.0, -1.0]))


class TestInRange:
    def test_nonsingular_always_true(self):
        rng = np.random.default_rng(2)
        A = rand_sym(rng, 3) + 5 * np.eye(3)
        assert linalg.in_range(A, rng.normal(size=3))

    def test_orthogonal_complement(self):
        assert not linalg.in_range(np.diag([1.0, 0.0]), np.array([0.0, 1.0]))

    def test_in_column_space(self):
        assert linalg.in_range(np.diag([1.0, 0.0]), np.array([3.0, 0.0]))

    def test_constructive_membership(self):
        rng = np.random.default_rng(9)
        Q = rand_sym(rng, 4)
        Q[3] = Q[:, 3] = 0.0  # force rank deficiency
        y = rng.normal(size=4)
        assert linalg.in_range(Q, Q @ y)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=2**32 - 1))
def test_split_reconstruction_property(n, seed):
    rng = np.random.default_rng(seed)
    A = rand_sym(rng, n)
    s = linalg.split_signed(A)
    scale = max(1.0, np.linalg.norm(A, "fro"))
    assert np.linalg.norm(s.reconstruct() - A, "fro") <= 1e-8 * scale
    assert s.pos_count + s.neg_count <= n
