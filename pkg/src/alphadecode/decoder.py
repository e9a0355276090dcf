"""End-to-end decoding of stock expected returns from alpha return panels.

``decode`` runs the full pipeline for the most recent date: build the
out-of-sample residual panel, turn residual variances into inverse-variance
regression weights, form the weighted Gram matrix of the current positions,
and solve through a truncated spectral pseudo-inverse.  The truncation
realizes the zero-regulator limit: directions the alphas never trade (exact
linear constraints) produce zero eigenvalues and simply drop out, and the
result does not depend on the cut as long as the spectrum has a clean gap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadWeight, NullGram, ValidationError, ZeroSpectrum
from .linalg import EigenSystem, sym_eigen
from .panels import DecodedReturns, as_position_tensor, as_return_panel
from .residuals import (
    RegressionWeights,
    build_residual_panel,
    regression_weights,
    specific_variance,
)

__all__ = [
    "WeightedGram",
    "DecodeInfo",
    "weighted_gram",
    "decode",
    "decode_with_explicit_weights",
]


@dataclass(frozen=True)
class WeightedGram:
    """Weighted Gram matrix of the current positions with its spectral split.

    ``retained`` marks eigenvalues above ``tol * lambda_max``; everything
    below the cut is treated as an untradable direction and excluded from the
    inverse.
    """

    matrix: np.ndarray
    eigen: EigenSystem
    retained: np.ndarray
    tol: float

    @property
    def retained_values(self) -> np.ndarray:
        return self.eigen.values[self.retained]

    @property
    def retained_vectors(self) -> np.ndarray:
        return self.eigen.vectors[:, self.retained]

    @property
    def n_retained(self) -> int:
        return int(self.retained.sum())


def _weight_vector(weights, n: int) -> np.ndarray:
    v = weights.v if isinstance(weights, RegressionWeights) else np.asarray(weights, float).ravel()
    if v.size != n:
        raise ValidationError(f"{v.size} weights for {n} alphas")
    if not np.isfinite(v).all() or not (v > 0.0).all():
        raise BadWeight("regression weights must be finite and strictly positive")
    return v


def weighted_gram(positions_s1, weights, tol: float = 1e-8) -> WeightedGram:
    """Eigendecomposed ``X_AB = sum_i v_i P_iA P_iB`` for the current date."""
    p = np.asarray(positions_s1, dtype=float)
    if p.ndim != 2:
        raise ValidationError(f"positions slice must be 2-d, got shape {p.shape}")
    v = _weight_vector(weights, p.shape[0])
    x = p.T @ (v[:, None] * p)
    x = 0.5 * (x + x.T)
    eig = sym_eigen(x)
    if eig.values.size == 0 or eig.values[0] <= 0.0:
        raise NullGram("weighted Gram matrix has no positive eigenvalue")
    retained = eig.values > tol * eig.values[0]
    return WeightedGram(x, eig, retained, tol)


def decode_with_explicit_weights(
    eta_s1, positions_s1, weights, tol: float = 1e-8, stock_ids=None
) -> DecodedReturns:
    """Weighted cross-sectional regression solve with caller-supplied weights.

    Returns the coefficients of regressing the current-date alpha returns on
    the current-date positions with weights ``v``, inverting the weighted
    Gram matrix through its retained eigenvalues only.
    """
    eta = np.asarray(eta_s1, dtype=float).ravel()
    p = np.asarray(positions_s1, dtype=float)
    if p.ndim != 2 or p.shape[0] != eta.size:
        raise ValidationError(
            f"positions shape {p.shape} inconsistent with {eta.size} alpha returns"
        )
    v = _weight_vector(weights, eta.size)
    gram = weighted_gram(p, v, tol)
    rhs = p.T @ (v * eta)
    coef = gram.retained_vectors @ (
        (gram.retained_vectors.T @ rhs) / gram.retained_values
    )
    if stock_ids is None:
        from .panels import default_stock_ids

        stock_ids = default_stock_ids(p.shape[1])
    return DecodedReturns(coef, tuple(stock_ids))


@dataclass(frozen=True)
class DecodeInfo:
    """Pipeline diagnostics produced alongside the decoded returns."""

    k_used: int
    weights: RegressionWeights
    gram: WeightedGram


def decode_arrays(
    eta: np.ndarray,
    positions: np.ndarray,
    k: int = 0,
    tol: float = 1e-8,
    weight_mode: str = "cov_kfactor",
    rounding: str = "trunc",
) -> tuple[np.ndarray, DecodeInfo]:
    """Array-level pipeline shared by ``decode`` and the constraint routes.

    Accepts raw arrays so reduced position tensors (whose slices are not
    L1-normalized) can run through the identical code path.
    """
    eta = np.asarray(eta, dtype=float)
    positions = np.asarray(positions, dtype=float)
    residual_panel = build_residual_panel(eta, positions)
    spec = specific_variance(residual_panel, k, rounding=rounding, mode=weight_mode)
    weights = regression_weights(spec)
    try:
        gram = weighted_gram(positions[:, :, 0], weights, tol)
    except ZeroSpectrum as exc:  # pragma: no cover - weighted_gram raises NullGram
        raise NullGram(str(exc)) from None
    rhs = positions[:, :, 0].T @ (weights.v * eta[:, 0])
    coef = gram.retained_vectors @ (
        (gram.retained_vectors.T @ rhs) / gram.retained_values
    )
    return coef, DecodeInfo(spec.k_used, weights, gram)


def decode(
    returns,
    positions,
    k: int = 0,
    tol: float = 1e-8,
    weight_mode: str = "cov_kfactor",
    rounding: str = "trunc",
) -> DecodedReturns:
    """Decode stock expected returns for the most recent date.

    Parameters
    ----------
    returns : AlphaReturnPanel or array_like of shape (N, d)
        Alpha expected returns, column 0 most recent.  d >= 3.
    positions : PositionTensor or array_like of shape (N, M, d)
        Desired holdings aligned with ``returns``.
    k : int
        Number of residual covariance components absorbed into the factor
        part of the regression weights.  0 keeps the plain residual variance,
        negative chooses the count by effective rank, and any ``k`` at or
        above the available component count falls back to 0.
    tol : float
        Relative eigenvalue cut for the weighted Gram matrix.
    weight_mode : {"plain", "cov_kfactor", "corr_kfactor"}
        Which matrix supplies the stripped components (see
        ``specific_variance``).
    rounding : {"trunc", "round"}
        How an effective-rank-chosen ``k`` becomes an integer.

    Returns
    -------
    DecodedReturns
        Stock expected returns for date index 1, aligned with the tensor's
        stock ids.
    """
    panel = as_return_panel(returns)
    tensor = as_position_tensor(positions)
    if tensor.n_alphas != panel.n_alphas or tensor.n_dates != panel.n_dates:
        raise ValidationError(
            f"positions {tensor.values.shape} inconsistent with panel "
            f"{panel.values.shape}"
        )
    coef, _ = decode_arrays(
        panel.values, tensor.values, k=k, tol=tol, weight_mode=weight_mode, rounding=rounding
    )
    return DecodedReturns(coef, tensor.stock_ids)
