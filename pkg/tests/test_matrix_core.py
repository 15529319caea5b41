import numpy as np
import numpy.testing as npt
import pytest

from spginv import (
    assemble_h,
    mp_residuals,
    multi_rhs_apply,
    norms,
    pseudoinverse,
    svd_partition,
)

from conftest import random_instance


class TestSvdPartition:
    def test_identity(self):
        f = svd_partition(np.eye(2))
        assert f.rank == 2
        npt.assert_allclose(f.d_inv, [1.0, 1.0])
        assert f.v2.shape == (2, 0)

    def test_diagonal_rank1(self):
        f = svd_partition(np.diag([3.0, 0.0]))
        assert f.rank == 1
        npt.assert_allclose(f.d_inv, [1.0 / 3.0])

    def test_singular_values_against_gram_eigenvalues(self, tum_fixture):
        # independent oracle: sigma^2 are the eigenvalues of A A^T
        f = svd_partition(tum_fixture)
        gram_eigs = np.linalg.eigvalsh(tum_fixture @ tum_fixture.T)[::-1]
        assert f.rank == 2
        npt.assert_allclose(f.sigma, np.sqrt(gram_eigs), rtol=1e-12)

    def test_zero_matrix_rejected(self):
        with pytest.raises(ValueError, match="zero matrix"):
            svd_partition(np.zeros((3, 2)))

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError, match="non-finite"):
            svd_partition(np.array([[1.0, np.nan]]))

    def test_explicit_rank_truncates(self):
        a = np.diag([3.0, 1e-3, 1e-12])
        assert svd_partition(a).rank == 2
        assert svd_partition(a, rank=1).rank == 1
        assert svd_partition(a, rank=3).rank == 3

    def test_factor_orthogonality_and_reconstruction(self):
        for seed, (m, n) in enumerate([(8, 5), (5, 8), (12, 12)]):
            a, f = random_instance(m, n, 3, seed=seed + 10, density=0.9)
            r = f.rank
            npt.assert_allclose(f.u1.T @ f.u1, np.eye(r), atol=1e-10)
            npt.assert_allclose(f.v1.T @ f.v1, np.eye(r), atol=1e-10)
            npt.assert_allclose(f.v2.T @ f.v2, np.eye(n - r), atol=1e-10)
            npt.assert_allclose(f.v1.T @ f.v2, np.zeros((r, n - r)), atol=1e-10)
            recon = (f.u1 * f.sigma) @ f.v1.T
            assert np.linalg.norm(recon - a) <= 1e-8 * np.linalg.norm(a)


class TestAssembleH:
    def test_zero_z_is_pseudoinverse(self, tum_fixture):
        f = svd_partition(tum_fixture)
        h = assemble_h(f, np.zeros((1, 2)))
        npt.assert_allclose(h, np.array([[2, -1], [1, 1], [-1, 2]]) / 3.0, atol=1e-12)
        npt.assert_array_equal(h, pseudoinverse(f))

    def test_identity_empty_z(self):
        f = svd_partition(np.eye(2))
        npt.assert_allclose(assemble_h(f, np.zeros((0, 2))), np.eye(2), atol=1e-12)

    def test_shape_mismatch(self, tum_fixture):
        f = svd_partition(tum_fixture)
        with pytest.raises(ValueError, match="shape"):
            assemble_h(f, np.zeros((2, 2)))

    def test_any_z_satisfies_structural_properties(self, tum_fixture):
        rng = np.random.default_rng(7)
        f = svd_partition(tum_fixture)
        for _ in range(25):
            h = assemble_h(f, rng.normal(size=(1, 2)))
            rep = mp_residuals(tum_fixture, h, pseudoinverse(f))
            bound = 1e-6 * max(1.0, np.linalg.norm(tum_fixture))
            assert rep.p1 <= bound and rep.p2 <= bound and rep.p3 <= bound
            assert rep.reflex_linear <= bound


class TestPseudoinverse:
    def test_scalar(self):
        npt.assert_allclose(pseudoinverse(svd_partition(np.array([[2.0]]))), [[0.5]])

    def test_rank1_outer_formula(self):
        # rank-1 oracle: pinv(A) = A.T / ||A||_F^2
        a = np.array([[1.0, 2.0], [2.0, 4.0]])
        npt.assert_allclose(pseudoinverse(svd_partition(a)),
                            np.array([[0.04, 0.08], [0.08, 0.16]]), atol=1e-14)

    def test_diagonal(self):
        npt.assert_allclose(pseudoinverse(svd_partition(np.diag([3.0, 0.0]))),
                            np.diag([1 / 3.0, 0.0]), atol=1e-15)


class TestNorms:
    def test_basic(self):
        rep = norms(np.array([[3.0, -4.0], [0.0, 0.0]]), 1e-5)
        assert rep.n1 == 7.0 and rep.n0 == 2
        assert rep.n21 == 5.0 and rep.n20 == 1

    def test_zero_matrix(self):
        rep = norms(np.zeros((3, 3)))
        assert (rep.n1, rep.n0, rep.n21, rep.n20) == (0.0, 0, 0.0, 0)

    def test_all_ones(self):
        rep = norms(np.ones((2, 2)))
        assert rep.n1 == 4.0 and rep.n0 == 4 and rep.n20 == 2
        npt.assert_allclose(rep.n21, 2.0 * np.sqrt(2.0))

    def test_norm_chain(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            h = rng.normal(size=rng.integers(1, 8, size=2))
            rep = norms(h)
            cols = h.shape[1]
            assert rep.n21 <= rep.n1 * (1 + 1e-10)
            assert rep.n1 <= np.sqrt(cols) * rep.n21 * (1 + 1e-10)
            assert rep.n20 <= rep.n0


class TestMpResiduals:
    def test_pseudoinverse_passes_all_four(self):
        a, f = random_instance(10, 6, 3, seed=5)
        rep = mp_residuals(a, pseudoinverse(f))
        tol = 1e-8 * np.linalg.norm(a)
        assert max(rep.p1, rep.p2, rep.p3, rep.p4, rep.reflex_linear) <= tol

    def test_identity(self):
        rep = mp_residuals(np.eye(3), np.eye(3))
        assert max(rep.p1, rep.p2, rep.p3, rep.p4, rep.reflex_linear) == 0.0

    def test_zero_h(self, tum_fixture):
        rep = mp_residuals(tum_fixture, np.zeros((3, 2)))
        npt.assert_allclose(rep.p1, np.linalg.norm(tum_fixture))
        assert rep.p2 == 0.0

    def test_shape_mismatch(self, tum_fixture):
        with pytest.raises(ValueError, match="shape"):
            mp_residuals(tum_fixture, np.zeros((2, 3)))


class TestMultiRhsApply:
    def test_identity_returns_b(self):
        b = np.arange(6.0).reshape(3, 2)
        npt.assert_array_equal(multi_rhs_apply(np.eye(3), b), b)

    def test_least_squares_solution(self, tum_fixture):
        f = svd_partition(tum_fixture)
        theta = multi_rhs_apply(pseudoinverse(f), np.array([1.0, 1.0]))
        npt.assert_allclose(theta, np.array([1.0, 2.0, 1.0]) / 3.0, atol=1e-12)

    def test_row_support_gives_exact_zeros(self):
        h = np.zeros((4, 3))
        h[2] = [1.0, 2.0, 3.0]
        out = multi_rhs_apply(h, np.ones((3, 5)))
        assert (out[[0, 1, 3]] == 0.0).all()
        npt.assert_allclose(out[2], 6.0)

    def test_normal_equations_for_structural_inverses(self):
        rng = np.random.default_rng(3)
        a, f = random_instance(20, 12, 5, seed=21)
        h = assemble_h(f, rng.normal(size=(12 - 5, 5)))
        b = rng.normal(size=(20, 4))
        theta = multi_rhs_apply(h, b)
        resid = a.T @ (a @ theta - b)
        for j in range(b.shape[1]):
            assert np.linalg.norm(resid[:, j]) <= 1e-6 * np.linalg.norm(a.T @ b[:, j])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="rows"):
            multi_rhs_apply(np.eye(3), np.ones(4))
