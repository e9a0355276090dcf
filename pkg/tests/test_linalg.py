import numpy as np
import pytest

from alphadecode.errors import (
    AsymmetricMatrix,
    BadWeight,
    NotPositiveDefinite,
    Underdetermined,
    ZeroSpectrum,
)
from alphadecode.linalg import (
    cholesky,
    eigen_low_rank,
    sym_eigen,
    wls_no_intercept,
)

from conftest import random_spd


class TestSymEigen:
    def test_identity(self):
        eig = sym_eigen(np.eye(3))
        assert np.allclose(eig.values, [1.0, 1.0, 1.0])

    def test_diagonal(self):
        eig = sym_eigen(np.diag([4.0, 2.0, 1.0]))
        assert np.allclose(eig.values, [4.0, 2.0, 1.0])
        # axis eigenvectors with the positive-sign convention
        assert np.allclose(np.abs(eig.vectors), np.eye(3))
        assert (eig.vectors.max(axis=0) > 0).all()

    def test_reconstruction(self, rng):
        a = random_spd(rng, 20)
        eig = sym_eigen(a)
        recon = eig.vectors @ np.diag(eig.values) @ eig.vectors.T
        assert np.linalg.norm(recon - a) < 1e-10 * np.linalg.norm(a)

    def test_eigenpair_residuals(self, rng):
        a = rng.standard_normal((15, 15))
        a = a + a.T
        eig = sym_eigen(a)
        scale = np.linalg.norm(a)
        for j in range(len(eig)):
            residual = a @ eig.vectors[:, j] - eig.values[j] * eig.vectors[:, j]
            assert np.linalg.norm(residual) <= 1e-8 * scale

    def test_descending_order(self, rng):
        a = random_spd(rng, 12)
        eig = sym_eigen(a)
        assert (np.diff(eig.values) <= 1e-12).all()

    def test_sign_convention(self, rng):
        a = random_spd(rng, 9)
        eig = sym_eigen(a)
        lead = np.abs(eig.vectors).argmax(axis=0)
        assert (eig.vectors[lead, np.arange(9)] > 0).all()

    def test_asymmetric_rejected(self):
        a = np.array([[1.0, 2.0], [0.0, 1.0]])
        with pytest.raises(AsymmetricMatrix):
            sym_eigen(a)

    def test_deterministic(self, rng):
        a = random_spd(rng, 10)
        first = sym_eigen(a)
        second = sym_eigen(a.copy())
        assert np.array_equal(first.values, second.values)
        assert np.array_equal(first.vectors, second.vectors)


class TestEigenLowRank:
    def test_rank_bound_demeaned(self, rng):
        x = rng.standard_normal((100, 6))
        eig = eigen_low_rank(x, demean_rows=True)
        assert len(eig) <= 5

    def test_matches_dense_covariance(self, rng):
        x = rng.standard_normal((50, 5))
        eig = eigen_low_rank(x, demean_rows=True)
        xc = x - x.mean(axis=1, keepdims=True)
        cov = xc @ xc.T / (x.shape[1] - 1)
        dense = sym_eigen(cov)
        k = len(eig)
        assert np.allclose(eig.values, dense.values[:k], rtol=1e-10, atol=1e-14)
        for j in range(k):
            a, b = eig.vectors[:, j], dense.vectors[:, j]
            sign = np.sign(a @ b)
            assert np.linalg.norm(a - sign * b) < 1e-8

    def test_no_demean(self, rng):
        x = rng.standard_normal((30, 4))
        eig = eigen_low_rank(x, demean_rows=False)
        scatter = x @ x.T / (x.shape[1] - 1)
        dense = sym_eigen(scatter)
        assert np.allclose(eig.values, dense.values[: len(eig)], rtol=1e-10, atol=1e-14)
        assert len(eig) <= 4

    def test_zero_matrix(self):
        with pytest.raises(ZeroSpectrum):
            eigen_low_rank(np.zeros((10, 4)))

    def test_constant_rows_demeaned_away(self):
        x = np.ones((6, 5))
        with pytest.raises(ZeroSpectrum):
            eigen_low_rank(x, demean_rows=True)

    def test_orthonormal_vectors(self, rng):
        x = rng.standard_normal((40, 8))
        eig = eigen_low_rank(x)
        gram = eig.vectors.T @ eig.vectors
        assert np.allclose(gram, np.eye(len(eig)), atol=1e-10)


class TestCholesky:
    def test_identity(self):
        assert np.array_equal(cholesky(np.eye(4)), np.eye(4))

    def test_diagonal(self):
        assert np.allclose(cholesky(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))

    def test_reconstruction(self, rng):
        a = random_spd(rng, 30)
        factor = cholesky(a)
        assert np.linalg.norm(factor @ factor.T - a) < 1e-12 * np.linalg.norm(a)

    def test_not_positive_definite(self):
        with pytest.raises(NotPositiveDefinite):
            cholesky(np.diag([1.0, -1.0]))


class TestWls:
    def test_identity_loadings(self, rng):
        y = rng.standard_normal(6)
        fit = wls_no_intercept(y, np.eye(6), rng.uniform(0.5, 2.0, 6))
        assert np.allclose(fit.coefficients, y)
        assert np.allclose(fit.residuals, 0.0, atol=1e-12)

    def test_ones_column_gives_mean(self, rng):
        y = rng.standard_normal(25)
        fit = wls_no_intercept(y, np.ones((25, 1)), np.ones(25))
        assert np.isclose(fit.coefficients[0], y.mean())

    def test_matches_normal_equations(self, rng):
        n, m = 40, 6
        loadings = rng.standard_normal((n, m))
        y = rng.standard_normal(n)
        v = rng.uniform(0.2, 3.0, n)
        fit = wls_no_intercept(y, loadings, v)
        gram = loadings.T @ (v[:, None] * loadings)
        expected = np.linalg.inv(gram) @ (loadings.T @ (v * y))
        assert np.linalg.norm(fit.coefficients - expected) < 1e-9

    def test_weighted_orthogonality(self, rng):
        n, m = 80, 7
        loadings = rng.standard_normal((n, m))
        y = rng.standard_normal(n)
        v = rng.uniform(0.1, 5.0, n)
        fit = wls_no_intercept(y, loadings, v)
        cross = loadings.T @ (v * fit.residuals)
        scale = np.linalg.norm(v * y) * np.linalg.norm(loadings)
        assert np.abs(cross).max() <= 1e-8 * scale

    def test_bad_weight(self, rng):
        with pytest.raises(BadWeight):
            wls_no_intercept(np.ones(4), np.eye(4), [1.0, 0.0, 1.0, 1.0])

    def test_underdetermined(self, rng):
        with pytest.raises(Underdetermined):
            wls_no_intercept(np.ones(3), rng.standard_normal((3, 5)), np.ones(3))

    def test_collinear_loadings_still_fit(self, rng):
        base = rng.standard_normal((30, 2))
        loadings = np.column_stack([base, base[:, 0] + base[:, 1]])
        y = rng.standard_normal(30)
        fit = wls_no_intercept(y, loadings, np.ones(30))
        # Residuals are still the projection residuals onto the 2-d column space.
        proj = np.linalg.lstsq(base, y, rcond=None)[0]
        assert np.allclose(fit.residuals, y - base @ proj, atol=1e-10)
