"""Synthetic market, position, and alpha-return generator.

Real position data is proprietary, so every test and demo runs on generated
instances: a market with cross-sectionally skewed volatilities, sparse
L1-normalized holdings (optionally projected onto a constraint null space),
realized alpha returns by contraction, and momentum-style expected returns
that use strictly older dates only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ProjectionFailed, TooShort, ValidationError
from .panels import (
    AlphaReturnPanel,
    ConstraintMatrix,
    PositionTensor,
    default_alpha_ids,
    default_stock_ids,
)

__all__ = [
    "SynthConfig",
    "SynthData",
    "gen_market",
    "gen_positions",
    "gen_alpha_returns",
    "gen_expected_returns",
    "gen_dataset",
]

# Width of the lognormal spread of per-stock volatilities around the median.
VOL_SPREAD_SIGMA = 0.5


@dataclass(frozen=True)
class SynthConfig:
    """Parameters for one synthetic instance.

    ``total_dates`` covers both the decoding window and the momentum lookback:
    expected returns exist for the first ``total_dates - momentum_window``
    dates.  ``constraint`` is ``"none"``, ``"dollar"``, or a custom M-by-p
    matrix; ``sparsity`` is the fraction of stocks each alpha trades.
    """

    n_alphas: int = 2000
    n_stocks: int = 50
    total_dates: int = 31
    momentum_window: int = 10
    stock_vol: float = 0.02
    constraint: object = "none"
    seed: int = 0
    sparsity: float = 1.0

    def __post_init__(self):
        if self.n_alphas < 1:
            raise ValidationError("need at least one alpha")
        if self.n_stocks < 2:
            raise ValidationError("need at least two stocks")
        if self.total_dates < self.momentum_window + 3:
            raise ValidationError(
                f"total_dates={self.total_dates} leaves fewer than 3 decodable "
                f"dates after a momentum window of {self.momentum_window}"
            )
        if not 0.0 < self.sparsity <= 1.0:
            raise ValidationError("sparsity must be in (0, 1]")
        if self.stock_vol < 0.0:
            raise ValidationError("stock_vol must be non-negative")

    def constraint_matrix(self) -> ConstraintMatrix | None:
        if isinstance(self.constraint, str):
            if self.constraint == "none":
                return None
            if self.constraint == "dollar":
                return ConstraintMatrix(
                    np.ones((self.n_stocks, 1)), default_stock_ids(self.n_stocks)
                )
            raise ValidationError(f"unknown constraint spec {self.constraint!r}")
        return ConstraintMatrix(
            np.asarray(self.constraint, dtype=float),
            default_stock_ids(self.n_stocks),
        )


@dataclass(frozen=True)
class SynthData:
    """One generated instance, ready for the decoding pipeline."""

    returns: AlphaReturnPanel
    positions: PositionTensor
    market: np.ndarray
    realized: np.ndarray
    constraints: ConstraintMatrix | None


def _rng(config: SynthConfig, stream: int) -> np.random.Generator:
    return np.random.default_rng([config.seed, stream])


def gen_market(config: SynthConfig) -> np.ndarray:
    """Realized stock returns, M by total_dates, column 0 most recent.

    Per-stock volatilities are drawn from a lognormal spread with median
    ``stock_vol``, reproducing the cross-sectional volatility skew of real
    universes; returns are independent normals on top.
    """
    rng = _rng(config, 1)
    vols = config.stock_vol * rng.lognormal(
        mean=0.0, sigma=VOL_SPREAD_SIGMA, size=config.n_stocks
    )
    return vols[:, None] * rng.standard_normal((config.n_stocks, config.total_dates))


def gen_positions(config: SynthConfig) -> PositionTensor:
    """Sparse random holdings, L1-normalized per (alpha, date) slice.

    Each alpha trades a fixed support of ``max(2, round(sparsity * M))``
    stocks (stock ``i mod M`` is always included so no stock goes untraded).
    With a constraint requested, each slice is alternately projected onto the
    constraint null space (within its support) and rescaled to unit L1 norm
    until both hold to 1e-10; scaling preserves the constraint, so this
    converges immediately except when the projection annihilates the slice,
    in which case the alpha is redrawn.
    """
    rng = _rng(config, 2)
    n, m, d = config.n_alphas, config.n_stocks, config.total_dates
    q = config.constraint_matrix()
    q_values = None if q is None else q.values
    support_size = max(2, int(round(config.sparsity * m)))
    values = np.zeros((n, m, d))
    for i in range(n):
        forced = i % m
        values[i] = _draw_alpha_slab(rng, m, d, support_size, forced, q_values, i)
    return PositionTensor(values, default_stock_ids(m), default_alpha_ids(n))


def _draw_alpha_slab(rng, m, d, support_size, forced, q_values, alpha_index):
    """All-dates holdings for one alpha, satisfying constraint and L1 norm."""
    for _attempt in range(100):
        others = [s for s in range(m) if s != forced]
        support = [forced] + list(
            rng.choice(others, size=support_size - 1, replace=False)
        )
        support.sort()
        block = rng.standard_normal((len(support), d))
        if q_values is not None:
            projector = _null_projector(q_values[support, :])
            ok = True
            for _sweep in range(100):
                block = projector @ block
                norms = np.abs(block).sum(axis=0)
                if (norms < 1e-12).any():
                    ok = False  # draw (nearly) annihilated by the constraints
                    break
                block = block / norms
                if _slab_converged(block, q_values[support, :]):
                    break
            else:
                raise ProjectionFailed(
                    f"alpha index {alpha_index}: projection did not converge "
                    "in 100 sweeps"
                )
            if not ok:
                continue  # constraint annihilated this draw; redraw support
        else:
            block = block / np.abs(block).sum(axis=0)
        slab = np.zeros((m, d))
        slab[support, :] = block
        return slab
    raise ProjectionFailed(
        f"alpha index {alpha_index}: no support admits a nonzero constrained "
        "position after 100 draws"
    )


def _null_projector(q_support: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the null space of the restricted constraints."""
    k = q_support.shape[0]
    if not q_support.any():
        return np.eye(k)
    u, sv, _ = np.linalg.svd(q_support, full_matrices=False)
    keep = sv > 1e-12 * sv[0]
    basis = u[:, keep]
    return np.eye(k) - basis @ basis.T


def _slab_converged(block: np.ndarray, q_support: np.ndarray) -> bool:
    if np.abs(np.abs(block).sum(axis=0) - 1.0).max() > 1e-10:
        return False
    if q_support.size and np.abs(q_support.T @ block).max() > 1e-10:
        return False
    return True


def gen_alpha_returns(market: np.ndarray, positions) -> np.ndarray:
    """Realized alpha returns: contraction of holdings with stock returns."""
    p = positions.values if isinstance(positions, PositionTensor) else np.asarray(positions, float)
    r = np.asarray(market, dtype=float)
    if p.ndim != 3 or r.ndim != 2 or p.shape[1] != r.shape[0] or p.shape[2] != r.shape[1]:
        raise ValidationError(
            f"positions {p.shape} inconsistent with market panel {r.shape}"
        )
    return np.einsum("ias,as->is", p, r)


def gen_expected_returns(realized: np.ndarray, momentum_window: int) -> AlphaReturnPanel:
    """Momentum expected returns: trailing mean of strictly older realized returns.

    ``eta[:, s]`` averages realized returns at dates s+1 .. s+window, so the
    panel is previsible by construction.  Raises ``TooShort`` when no date has
    a full window of history behind it.
    """
    rho = np.asarray(realized, dtype=float)
    if rho.ndim != 2:
        raise ValidationError(f"realized returns must be 2-d, got shape {rho.shape}")
    if momentum_window < 1:
        raise ValidationError("momentum window must be at least 1")
    d_out = rho.shape[1] - momentum_window
    if d_out < 1:
        raise TooShort(
            f"{rho.shape[1]} dates leave no room for a momentum window of "
            f"{momentum_window}"
        )
    eta = np.empty((rho.shape[0], d_out))
    for s in range(d_out):
        eta[:, s] = rho[:, s + 1 : s + 1 + momentum_window].mean(axis=1)
    return AlphaReturnPanel(eta, default_alpha_ids(rho.shape[0]))


def gen_dataset(config: SynthConfig) -> SynthData:
    """Generate a full instance: market, positions, realized and expected returns.

    The returned position tensor is cut down to the dates the expected-return
    panel covers, so the pair feeds straight into the decoder.
    """
    market = gen_market(config)
    positions = gen_positions(config)
    realized = gen_alpha_returns(market, positions)
    panel = gen_expected_returns(realized, config.momentum_window)
    d_out = panel.n_dates
    trimmed = PositionTensor(
        positions.values[:, :, :d_out], positions.stock_ids, positions.alpha_ids
    )
    return SynthData(panel, trimmed, market, realized, config.constraint_matrix())
