import numpy as np
import pytest

from alphadecode.decoder import decode
from alphadecode.errors import ZeroSignal
from alphadecode.portfolio import (
    build_phi_diagonal,
    build_phi_one_factor,
    stock_weights,
)

from conftest import random_instance, random_spd


class TestStockWeights:
    def test_identity_covariance(self, rng):
        e = rng.standard_normal(6)
        weights = stock_weights(e, np.eye(6))
        assert np.allclose(weights.w, e / np.abs(e).sum(), atol=1e-14)

    def test_diagonal_covariance(self, rng):
        e = rng.standard_normal(5)
        sigma_sq = rng.uniform(0.5, 3.0, 5)
        weights = stock_weights(e, np.diag(sigma_sq))
        raw = e / sigma_sq
        assert np.allclose(weights.w, raw / np.abs(raw).sum(), atol=1e-14)

    def test_inverts_the_relation(self, rng):
        e = rng.standard_normal(7)
        phi = random_spd(rng, 7)
        weights = stock_weights(e, phi)
        recovered = phi @ weights.w / weights.gamma
        assert np.linalg.norm(recovered - e) < 1e-10 * np.linalg.norm(e)

    def test_unit_gross_and_positive_gamma(self, rng):
        weights = stock_weights(rng.standard_normal(9), random_spd(rng, 9))
        assert abs(np.abs(weights.w).sum() - 1.0) < 1e-12
        assert weights.gamma > 0

    def test_scaling_invariance(self, rng):
        e = rng.standard_normal(6)
        phi = random_spd(rng, 6)
        assert np.allclose(stock_weights(e, phi).w, stock_weights(5.0 * e, phi).w)

    def test_zero_signal(self, rng):
        with pytest.raises(ZeroSignal):
            stock_weights(np.zeros(4), np.eye(4))

    def test_identity_phi_parallel_to_decode(self, rng):
        eta, positions = random_instance(rng, 80, 6, 5)
        decoded = decode(eta, positions, k=1)
        weights = stock_weights(decoded, np.eye(6))
        cosine = (weights.w @ decoded.values) / (
            np.linalg.norm(weights.w) * np.linalg.norm(decoded.values)
        )
        assert cosine > 1 - 1e-12


class TestPhiDiagonal:
    def test_constant_returns_floored(self):
        model = build_phi_diagonal(np.ones((4, 10)))
        assert (np.diag(model.covariance) > 0).all()
        model.cholesky_factor  # construction already proved positive definite

    def test_hand_variances(self):
        panel = np.array([[1.0, 2.0, 3.0], [2.0, 2.0, 2.0]])
        model = build_phi_diagonal(panel)
        assert model.covariance[0, 0] == pytest.approx(1.0)
        assert model.covariance[1, 1] > 0  # floored, not zero

    def test_matches_variance_oracle(self, rng):
        panel = rng.standard_normal((8, 40))
        model = build_phi_diagonal(panel)
        assert np.allclose(np.diag(model.covariance), panel.var(axis=1, ddof=1))
        assert np.allclose(model.covariance, np.diag(np.diag(model.covariance)))


class TestPhiOneFactor:
    def test_identical_stocks_degenerate_market(self, rng):
        row = rng.standard_normal(30)
        panel = np.tile(row, (5, 1))
        model = build_phi_one_factor(panel)
        # Rank-1 dominant with floored residuals; construction implies Cholesky
        # succeeded.
        eigenvalues = np.linalg.eigvalsh(model.covariance)
        assert eigenvalues[-1] / max(eigenvalues[0], 1e-300) > 1e6

    def test_random_panel_positive_definite(self, rng):
        panel = 0.02 * rng.standard_normal((12, 50))
        model = build_phi_one_factor(panel)
        assert np.linalg.eigvalsh(model.covariance).min() > 0

    def test_beta_recovery(self, rng):
        m, t = 30, 500
        true_beta = rng.uniform(0.5, 1.5, m)
        market = 0.02 * rng.standard_normal(t)
        panel = true_beta[:, None] * market[None, :] + 0.002 * rng.standard_normal((m, t))
        model = build_phi_one_factor(panel)
        # Off-diagonal block is market_var * beta_a * beta_b, so any row of it
        # recovers the betas up to scale.
        estimated = model.covariance[0, 1:]
        corr = np.corrcoef(estimated, true_beta[1:])[0, 1]
        assert corr > 0.99
