"""Out-of-sample residual panel and regression-weight construction.

The decoding regression weights each alpha by the inverse of its residual
variance.  Residuals come from per-date unit-weight cross-sectional
regressions of alpha returns on the positions, run only on dates older than
the one being decoded, so nothing from the decoding date leaks into the
weights.  The variance can optionally be reduced to its idiosyncratic part by
stripping the top principal components of the residual covariance (or
correlation) matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadMultiplier,
    DegenerateDate,
    EmptySpectrum,
    TooFewDates,
    TooShort,
    ValidationError,
    ZeroSpectrum,
)
from .linalg import eigen_low_rank, wls_no_intercept
from .panels import as_position_tensor, as_return_panel, AlphaReturnPanel, PositionTensor

__all__ = [
    "ResidualPanel",
    "SpecificVariance",
    "RegressionWeights",
    "WEIGHT_MODES",
    "build_residual_panel",
    "moving_variance",
    "erank",
    "specific_variance",
    "regression_weights",
    "variance_floor",
]

WEIGHT_MODES = ("plain", "cov_kfactor", "corr_kfactor")


@dataclass(frozen=True)
class ResidualPanel:
    """N-by-(d-1) residuals; column j holds the regression at date index j+2."""

    values: np.ndarray

    @property
    def n_alphas(self) -> int:
        return self.values.shape[0]

    @property
    def n_columns(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class SpecificVariance:
    """Per-alpha variance left after discarding ``k_used`` residual components."""

    values: np.ndarray
    k_used: int
    mode: str


@dataclass(frozen=True)
class RegressionWeights:
    """Strictly positive per-alpha regression weights (inverse variances)."""

    v: np.ndarray
    mode: str = "plain"
    k_used: int = 0

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float).ravel()
        if not np.isfinite(v).all() or not (v > 0.0).all():
            raise ValidationError("regression weights must be finite and positive")
        object.__setattr__(self, "v", v)


def build_residual_panel(returns, positions) -> ResidualPanel:
    """Residuals of per-date unit-weight regressions of returns on positions.

    Column j of the result holds the residuals for date index j+2; the most
    recent date never enters.  Raw arrays are accepted alongside the
    validated panel types, which lets reduced (non-normalized) position
    tensors reuse the same engine.
    """
    eta = returns.values if isinstance(returns, AlphaReturnPanel) else np.asarray(returns, float)
    pos = positions.values if isinstance(positions, PositionTensor) else np.asarray(positions, float)
    if eta.ndim != 2 or pos.ndim != 3:
        raise ValidationError(
            f"need a 2-d return panel and 3-d positions, got {eta.shape} and {pos.shape}"
        )
    n, d = eta.shape
    if pos.shape[0] != n or pos.shape[2] != d:
        raise ValidationError(
            f"panel shape {eta.shape} inconsistent with positions {pos.shape}"
        )
    if d < 2:
        raise TooFewDates(f"need at least 2 dates to form residuals, got {d}")
    unit = np.ones(n)
    res = np.empty((n, d - 1))
    for s in range(1, d):
        loadings = pos[:, :, s]
        if not loadings.any():
            raise DegenerateDate(f"positions vanish identically at date index {s + 1}")
        res[:, s - 1] = wls_no_intercept(eta[:, s], loadings, unit).residuals
    return ResidualPanel(res)


def moving_variance(series) -> float:
    """Unbiased sample variance of a series (n - 1 divisor)."""
    x = np.asarray(series, dtype=float).ravel()
    if x.size < 2:
        raise TooShort(f"need at least 2 observations, got {x.size}")
    return float(np.var(x, ddof=1))


def _row_variances(x: np.ndarray) -> np.ndarray:
    if x.shape[1] < 2:
        raise TooShort(f"need at least 2 columns, got {x.shape[1]}")
    return np.var(x, axis=1, ddof=1)


def erank(spectrum, exclude_first: bool = False) -> float:
    """Effective rank: exp of the spectral entropy of the positive eigenvalues.

    With ``exclude_first`` the largest positive eigenvalue is dropped before
    the entropy and 1 is added back to the result.
    """
    s = np.asarray(spectrum, dtype=float).ravel()
    s = s[s > 0.0]
    if exclude_first:
        if s.size < 2:
            raise EmptySpectrum("need at least two positive eigenvalues to exclude one")
        s = np.sort(s)[::-1][1:]
    elif s.size == 0:
        raise EmptySpectrum("spectrum has no positive entries")
    p = s / s.sum()
    value = float(np.exp(-(p * np.log(p)).sum()))
    return value + 1.0 if exclude_first else value


def _resolve_k(spectrum: np.ndarray, m: int, rounding: str) -> int:
    er = erank(spectrum, exclude_first=False)
    if rounding == "trunc":
        chosen = math.trunc(er)
    elif rounding == "round":
        chosen = round(er)
    else:
        raise ValidationError(f"unknown rounding {rounding!r}; use 'trunc' or 'round'")
    # A perfectly flat spectrum would choose k == m and leave nothing to keep;
    # always retain at least one discarded component.
    return max(1, min(chosen, m - 1))


def specific_variance(
    residuals, k: int, rounding: str = "trunc", mode: str = "cov_kfactor"
) -> SpecificVariance:
    """Per-alpha idiosyncratic variance of the residual panel.

    ``k == 0`` (or ``k >= m`` where ``m = columns - 1``) returns the plain
    per-row variance.  Otherwise the top ``k`` principal components of the
    residual covariance are stripped: the result is the tail sum
    ``sum_{r > k} theta_r U_ir^2``.  Negative ``k`` picks the component count
    from the effective rank of the positive spectrum, truncated or rounded.

    ``mode`` selects the matrix whose components are stripped: the residual
    covariance (``cov_kfactor``) or the residual correlation
    (``corr_kfactor``, which scales the plain variance by the idiosyncratic
    share of the correlation).  ``plain`` forces the k == 0 path.
    """
    x = residuals.values if isinstance(residuals, ResidualPanel) else np.asarray(residuals, float)
    if x.ndim != 2:
        raise ValidationError(f"residual panel must be 2-d, got shape {x.shape}")
    if mode not in WEIGHT_MODES:
        raise ValidationError(f"unknown weight mode {mode!r}; use one of {WEIGHT_MODES}")
    m = x.shape[1] - 1
    plain = _row_variances(x)
    if mode == "plain" or k == 0 or k >= m:
        return SpecificVariance(plain, 0, mode)

    if mode == "cov_kfactor":
        try:
            eig = eigen_low_rank(x, demean_rows=True)
        except ZeroSpectrum:
            return SpecificVariance(plain, 0, mode)  # all-zero residuals; floor later
        k_used = _resolve_k(eig.values, m, rounding) if k < 0 else int(k)
        tail_vecs = eig.vectors[:, k_used:]
        tail_vals = eig.values[k_used:]
        xi2 = (tail_vecs**2 * tail_vals[None, :]).sum(axis=1)
        return SpecificVariance(xi2, k_used, mode)

    # corr_kfactor: strip components of the correlation matrix, then scale
    # the idiosyncratic correlation share back by the plain variance.
    sd = np.sqrt(plain)
    safe = sd > 0.0
    standardized = np.zeros_like(x)
    centered = x - x.mean(axis=1, keepdims=True)
    standardized[safe] = centered[safe] / sd[safe, None]
    try:
        eig = eigen_low_rank(standardized, demean_rows=True)
    except ZeroSpectrum:
        return SpecificVariance(plain, 0, mode)
    k_used = _resolve_k(eig.values, m, rounding) if k < 0 else int(k)
    tail_vecs = eig.vectors[:, k_used:]
    tail_vals = eig.values[k_used:]
    psi2 = (tail_vecs**2 * tail_vals[None, :]).sum(axis=1)
    return SpecificVariance(plain * psi2, k_used, mode)


def variance_floor(values: np.ndarray) -> float:
    """Floor protecting against perfect-fit alphas with zero residual variance."""
    positive = values[values > 0.0]
    if positive.size == 0:
        return 1e-12
    return 1e-12 * float(np.median(positive))


def regression_weights(spec_var, turnover_multiplier=None, floor: float | None = None) -> RegressionWeights:
    """Inverse-variance regression weights with a variance floor.

    ``v_i = multiplier_i / max(spec_var_i, floor)``.  The default floor is
    ``1e-12`` times the median positive variance (1e-12 if none are positive)
    so zero-variance alphas get large but finite weight.  The optional
    multiplier suppresses individual alphas, e.g. high-turnover ones.
    """
    if isinstance(spec_var, SpecificVariance):
        values, mode, k_used = spec_var.values, spec_var.mode, spec_var.k_used
    else:
        values, mode, k_used = np.asarray(spec_var, dtype=float).ravel(), "plain", 0
    if (values < 0.0).any() or not np.isfinite(values).all():
        raise ValidationError("specific variances must be finite and non-negative")
    if floor is None:
        floor = variance_floor(values)
    if turnover_multiplier is None:
        multiplier = 1.0
    else:
        multiplier = np.asarray(turnover_multiplier, dtype=float).ravel()
        if multiplier.size != values.size:
            raise ValidationError(
                f"{multiplier.size} multipliers for {values.size} alphas"
            )
        if not (multiplier > 0.0).all():
            raise BadMultiplier("turnover multipliers must be strictly positive")
    v = multiplier / np.maximum(values, floor)
    return RegressionWeights(v, mode, k_used)
