"""Stock portfolio weights from decoded expected returns, plus two simple
covariance generators used for tests and demos."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError, ZeroSignal
from .panels import DecodedReturns, StockRiskModel, as_risk_model
from .residuals import variance_floor

__all__ = [
    "StockWeights",
    "stock_weights",
    "build_phi_diagonal",
    "build_phi_one_factor",
]


@dataclass(frozen=True)
class StockWeights:
    """Sharpe-maximal stock weights, L1-normalized; ``gamma`` is the positive
    scale that maps the raw solve onto the unit-gross portfolio."""

    w: np.ndarray
    gamma: float


def stock_weights(expected_returns, risk_model) -> StockWeights:
    """Maximize the portfolio Sharpe ratio: ``w = gamma * Phi^-1 E``.

    ``gamma > 0`` is fixed by ``sum |w| = 1``.  Raises ``ZeroSignal`` when the
    expected returns vanish identically.
    """
    e = (
        expected_returns.values
        if isinstance(expected_returns, DecodedReturns)
        else np.asarray(expected_returns, dtype=float).ravel()
    )
    model = as_risk_model(risk_model)
    if e.size != model.n_stocks:
        raise ValidationError(f"{e.size} expected returns for {model.n_stocks} stocks")
    if not e.any():
        raise ZeroSignal("expected returns are identically zero")
    raw = np.linalg.solve(model.covariance, e)
    gamma = 1.0 / float(np.abs(raw).sum())
    return StockWeights(gamma * raw, gamma)


def build_phi_diagonal(returns_panel, stock_ids=None) -> StockRiskModel:
    """Diagonal covariance from per-stock sample variances (floored)."""
    r = np.asarray(returns_panel, dtype=float)
    if r.ndim != 2 or r.shape[1] < 2:
        raise ValidationError(
            f"need an M-by-T panel with T >= 2, got shape {r.shape}"
        )
    variances = np.var(r, axis=1, ddof=1)
    floor = variance_floor(variances)
    return StockRiskModel(np.diag(np.maximum(variances, floor)), stock_ids)


def build_phi_one_factor(returns_panel, stock_ids=None) -> StockRiskModel:
    """One-factor covariance: market betas plus floored residual variances.

    The market series is the cross-sectional mean return; betas come from
    per-stock regressions on it.  The residual-variance floor keeps the
    result positive definite even for degenerate panels.
    """
    r = np.asarray(returns_panel, dtype=float)
    if r.ndim != 2 or r.shape[1] < 3:
        raise ValidationError(
            f"need an M-by-T panel with T >= 3, got shape {r.shape}"
        )
    market = r.mean(axis=0)
    market_centered = market - market.mean()
    market_var = float(np.var(market, ddof=1))
    r_centered = r - r.mean(axis=1, keepdims=True)
    if market_var > 0.0:
        betas = (r_centered @ market_centered) / (market_centered @ market_centered)
    else:
        betas = np.zeros(r.shape[0])
    residual = r_centered - betas[:, None] * market_centered[None, :]
    residual_var = (residual**2).sum(axis=1) / (r.shape[1] - 1)
    # Anchor the floor on the factor variance too: a degenerate panel (all
    # stocks identical) leaves only roundoff in the residuals, and a floor
    # derived from those alone would not keep the rank-1 part invertible.
    floor = max(variance_floor(residual_var), 1e-12 * market_var)
    covariance = market_var * np.outer(betas, betas) + np.diag(
        np.maximum(residual_var, floor)
    )
    return StockRiskModel(covariance, stock_ids)
