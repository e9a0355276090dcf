"""Factor risk models for alpha portfolios and the optimization-vs-regression
comparison for the implied stock weights.

The alpha covariance is held strictly in factored form,
``diag(zeta^2) + B B^T`` with ``B`` the positions times the Cholesky factor
of the stock covariance (optionally augmented with scaled residual principal
components), so nothing of size N-by-N is ever materialized.  Solves go
through the factored inverse: an M-by-M system instead of N-by-N.

When alphas vastly outnumber stocks, Sharpe-maximal alpha weights push the
combined stock portfolio onto the same weights the decoding regression
produces; ``large_n_gap`` measures how close the two routes are on a given
instance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decoder import decode_with_explicit_weights
from .errors import ValidationError, ZeroSignal
from .linalg import sym_eigen, truncated_spectral_solve, wls_no_intercept
from .panels import as_risk_model
from .residuals import RegressionWeights

__all__ = [
    "AlphaFactorModel",
    "AlphaWeights",
    "LargeNGapReport",
    "build_alpha_model",
    "sharpe_optimal_alpha_weights",
    "regression_residual_alpha_weights",
    "expansion_alpha_weights",
    "combo_stock_weights",
    "large_n_gap",
]


@dataclass(frozen=True)
class AlphaFactorModel:
    """Alpha covariance ``diag(specific_var) + B B^T`` in factored form.

    ``loadings`` is the positions-times-Cholesky block; ``residual_pcs``
    optionally appends sqrt-eigenvalue-scaled residual components (built from
    regression residuals, hence orthogonal to the positions) with unit factor
    covariance.
    """

    specific_var: np.ndarray
    loadings: np.ndarray
    residual_pcs: np.ndarray | None = None

    def __post_init__(self):
        zeta_sq = np.asarray(self.specific_var, dtype=float).ravel()
        loadings = np.asarray(self.loadings, dtype=float)
        if loadings.ndim != 2 or loadings.shape[0] != zeta_sq.size:
            raise ValidationError(
                f"loadings shape {loadings.shape} inconsistent with "
                f"{zeta_sq.size} specific variances"
            )
        if not np.isfinite(zeta_sq).all() or not (zeta_sq > 0.0).all():
            raise ValidationError("specific variances must be finite and positive")
        object.__setattr__(self, "specific_var", zeta_sq)
        object.__setattr__(self, "loadings", loadings)
        if self.residual_pcs is not None:
            pcs = np.asarray(self.residual_pcs, dtype=float)
            if pcs.ndim != 2 or pcs.shape[0] != zeta_sq.size:
                raise ValidationError(
                    f"residual components shape {pcs.shape} inconsistent with "
                    f"{zeta_sq.size} alphas"
                )
            object.__setattr__(self, "residual_pcs", pcs)

    @property
    def n_alphas(self) -> int:
        return self.specific_var.size

    @property
    def block(self) -> np.ndarray:
        """Full low-rank loading block, stock factors first."""
        if self.residual_pcs is None:
            return self.loadings
        return np.concatenate([self.loadings, self.residual_pcs], axis=1)

    def factor_gram(self) -> np.ndarray:
        """``q = B^T diag(1/zeta^2) B``, the scaled-loading Gram matrix."""
        b = self.block
        return b.T @ (b / self.specific_var[:, None])

    def covariance(self) -> np.ndarray:
        """Materialize the dense N-by-N covariance (small N only)."""
        b = self.block
        return np.diag(self.specific_var) + b @ b.T

    def solve(self, rhs, tol: float = 1e-8) -> np.ndarray:
        """Apply the inverse covariance without forming it.

        The factored identity reduces the N-by-N solve to the (M+K)-by-(M+K)
        system ``(I + q) z = B^T (rhs / zeta^2)``, handled through a truncated
        spectral pseudo-inverse (all eigenvalues are >= 1, so the cut only
        ever matters for pathological scales).
        """
        rhs = np.asarray(rhs, dtype=float).ravel()
        if rhs.size != self.n_alphas:
            raise ValidationError(f"{rhs.size} entries for {self.n_alphas} alphas")
        y = rhs / self.specific_var
        b = self.block
        core = self.factor_gram()
        core[np.diag_indices_from(core)] += 1.0
        core = 0.5 * (core + core.T)
        z, _ = truncated_spectral_solve(sym_eigen(core), b.T @ y, tol)
        return y - (b @ z) / self.specific_var


@dataclass(frozen=True)
class AlphaWeights:
    """Alpha portfolio weights normalized to unit gross, ``sum |w| = 1``."""

    w: np.ndarray
    kappa: float


def build_alpha_model(
    positions_s1, risk_model, zeta_sq, residual_pcs=None
) -> AlphaFactorModel:
    """Assemble the factored alpha covariance for the current date.

    Parameters
    ----------
    positions_s1 : array_like of shape (N, M)
        Current-date holdings.
    risk_model : StockRiskModel or array_like of shape (M, M)
        Stock covariance; must be positive definite.
    zeta_sq : array_like of shape (N,)
        Specific variances, strictly positive.
    residual_pcs : array_like of shape (N, K), optional
        Sqrt-eigenvalue-scaled residual principal components.  Must be
        orthogonal to the positions (they are whenever they come from
        regression residuals); this is validated.
    """
    p = np.asarray(positions_s1, dtype=float)
    if p.ndim != 2:
        raise ValidationError(f"positions slice must be 2-d, got shape {p.shape}")
    model = as_risk_model(risk_model)
    if model.n_stocks != p.shape[1]:
        raise ValidationError(
            f"risk model covers {model.n_stocks} stocks, positions have {p.shape[1]}"
        )
    loadings = p @ model.cholesky_factor
    if residual_pcs is not None:
        pcs = np.asarray(residual_pcs, dtype=float)
        cross = np.abs(pcs.T @ p).max() if pcs.size else 0.0
        scale = np.linalg.norm(pcs) * np.linalg.norm(p)
        if scale > 0.0 and cross > 1e-8 * scale:
            raise ValidationError(
                "residual components are not orthogonal to the positions "
                f"(residual {cross:.3e} vs scale {scale:.3e})"
            )
    return AlphaFactorModel(np.asarray(zeta_sq, dtype=float).ravel(), loadings, residual_pcs)


def sharpe_optimal_alpha_weights(model: AlphaFactorModel, eta_s1, tol: float = 1e-8) -> AlphaWeights:
    """Sharpe-maximal alpha weights ``w = kappa * Gamma^-1 eta``, unit gross."""
    eta = np.asarray(eta_s1, dtype=float).ravel()
    if not eta.any():
        raise ZeroSignal("alpha expected returns are identically zero")
    raw = model.solve(eta, tol)
    gross = float(np.abs(raw).sum())
    if gross == 0.0:
        raise ZeroSignal("optimal weights vanish; nothing to normalize")
    kappa = 1.0 / gross
    return AlphaWeights(kappa * raw, kappa)


def regression_residual_alpha_weights(eta_s1, positions_s1, weights) -> AlphaWeights:
    """Alpha weights proportional to weighted regression residuals.

    This is the limit the optimization collapses to when the factor structure
    dominates: weight each alpha by ``v_i`` times its residual after the
    weighted regression of returns on positions.  The combined stock holdings
    of this portfolio vanish identically, because the weighted residuals are
    orthogonal to every position column.
    """
    eta = np.asarray(eta_s1, dtype=float).ravel()
    p = np.asarray(positions_s1, dtype=float)
    v = weights.v if isinstance(weights, RegressionWeights) else np.asarray(weights, float).ravel()
    if not eta.any():
        raise ZeroSignal("alpha expected returns are identically zero")
    fit = wls_no_intercept(eta, p, v)
    raw = v * fit.residuals
    gross = float(np.abs(raw).sum())
    if gross == 0.0:
        raise ZeroSignal("residual weights vanish; nothing to normalize")
    kappa = 1.0 / gross
    return AlphaWeights(kappa * raw, kappa)


def expansion_alpha_weights(
    model: AlphaFactorModel, eta_s1, order: int = 2, tol: float = 1e-8
) -> AlphaWeights:
    """Diagnostic: alpha weights from the truncated large-N series.

    Replaces the exact ``(I + q)^-1`` with the first ``order`` terms of its
    expansion in ``q^-1`` (pseudo-inverted when constraints make ``q``
    singular).  Order 1 is the pure-regression limit; order 2 adds the first
    correction.  Production solves never use this.
    """
    if order not in (1, 2):
        raise ValidationError(f"series order must be 1 or 2, got {order}")
    eta = np.asarray(eta_s1, dtype=float).ravel()
    if not eta.any():
        raise ZeroSignal("alpha expected returns are identically zero")
    zeta = np.sqrt(model.specific_var)
    beta = model.block / zeta[:, None]
    u = eta / zeta
    q = beta.T @ beta
    q = 0.5 * (q + q.T)
    eig = sym_eigen(q)
    kept = eig.values > tol * eig.values[0] if eig.values[0] > 0 else np.zeros_like(eig.values, bool)
    vk = eig.vectors[:, kept]
    inv_vals = 1.0 / eig.values[kept]
    def apply_pinv(x, power):
        return vk @ ((vk.T @ x) * inv_vals**power)
    t = beta.T @ u
    core = apply_pinv(t, 1)
    if order == 2:
        core = core - apply_pinv(t, 2)
    raw = (u - beta @ core) / zeta
    gross = float(np.abs(raw).sum())
    if gross == 0.0:
        raise ZeroSignal("series weights vanish; nothing to normalize")
    return AlphaWeights(raw / gross, 1.0 / gross)


def combo_stock_weights(positions_s1, alpha_weights) -> np.ndarray:
    """Stock holdings implied by an alpha portfolio: ``w_A = sum_i P_iA w_i``."""
    p = np.asarray(positions_s1, dtype=float)
    w = alpha_weights.w if isinstance(alpha_weights, AlphaWeights) else np.asarray(alpha_weights, float).ravel()
    if p.ndim != 2 or p.shape[0] != w.size:
        raise ValidationError(
            f"positions shape {p.shape} inconsistent with {w.size} alpha weights"
        )
    return p.T @ w


@dataclass(frozen=True)
class LargeNGapReport:
    """Agreement between the optimization route and the regression route.

    Both stock weight vectors are L2-normalized before comparison.  The
    sensitivity sweep rescales the specific risk relative to the factor risk
    and reports the cosine for each scale; insensitivity is the large-N
    prediction, not an assumption.
    """

    cosine: float
    norm_gap: float
    optimization_weights: np.ndarray
    regression_weights: np.ndarray
    q_diag: np.ndarray
    sweep: tuple[tuple[float, float], ...]
    n_alphas: int
    n_stocks: int

    def as_text(self) -> str:
        lines = [
            f"n_alphas={self.n_alphas}",
            f"n_stocks={self.n_stocks}",
            f"cosine={self.cosine:.12g}",
            f"norm_gap={self.norm_gap:.12g}",
            f"q_diag_min={self.q_diag.min():.12g}",
            f"q_diag_mean={self.q_diag.mean():.12g}",
            f"q_diag_max={self.q_diag.max():.12g}",
        ]
        for scale, cosine in self.sweep:
            lines.append(f"cosine_at_specific_scale_{scale:g}={cosine:.12g}")
        return "\n".join(lines)


def _normalized(x: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(x))
    return x / norm if norm > 0.0 else x


def large_n_gap(
    positions_s1,
    risk_model,
    zeta_sq,
    eta_s1,
    tol: float = 1e-8,
    specific_scale_sweep: tuple[float, ...] = (0.1, 1.0, 10.0),
) -> LargeNGapReport:
    """Compare optimization-route and regression-route stock weights.

    Route (a): Sharpe-optimal alpha weights under the factored covariance,
    combined into stock holdings.  Route (b): the weighted regression decode
    with ``v = 1/zeta^2`` mapped through the inverse stock covariance.  The
    report carries the cosine and L2 gap of the normalized weight vectors,
    the loading concentration diagnostic ``q_AA`` (the comparison is only
    meaningful when these are all much larger than 1), and the cosine under
    rescaled specific risk.
    """
    p = np.asarray(positions_s1, dtype=float)
    model = as_risk_model(risk_model)
    zeta_sq = np.asarray(zeta_sq, dtype=float).ravel()
    eta = np.asarray(eta_s1, dtype=float).ravel()

    factored = build_alpha_model(p, model, zeta_sq)
    q_diag = np.diag(factored.factor_gram()).copy()
    opt = _normalized(
        combo_stock_weights(p, sharpe_optimal_alpha_weights(factored, eta, tol))
    )

    decoded = decode_with_explicit_weights(eta, p, 1.0 / zeta_sq, tol)
    reg = _normalized(np.linalg.solve(model.covariance, decoded.values))

    cosine = float(opt @ reg)
    norm_gap = float(np.linalg.norm(opt - reg))

    sweep = []
    for scale in specific_scale_sweep:
        scaled = AlphaFactorModel(
            scale * zeta_sq, factored.loadings, factored.residual_pcs
        )
        opt_scaled = _normalized(
            combo_stock_weights(p, sharpe_optimal_alpha_weights(scaled, eta, tol))
        )
        sweep.append((float(scale), float(opt_scaled @ reg)))

    return LargeNGapReport(
        cosine=cosine,
        norm_gap=norm_gap,
        optimization_weights=opt,
        regression_weights=reg,
        q_diag=q_diag,
        sweep=tuple(sweep),
        n_alphas=p.shape[0],
        n_stocks=p.shape[1],
    )
