"""Estimator-style wrapper so the decoding pipeline composes with the
scikit-learn ecosystem (``get_params`` / ``set_params``, cloning, fitted
attributes with trailing underscores)."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .constraints import decode_via_elimination, discover_constraints
from .decoder import decode_arrays
from .errors import ValidationError
from .panels import (
    ConstraintMatrix,
    as_constraint_matrix,
    as_position_tensor,
    as_return_panel,
    validate_constraints,
)

__all__ = ["StockReturnDecoder"]


class StockReturnDecoder(BaseEstimator):
    """Decode stock expected returns from alpha return panels.

    ``fit`` consumes an alpha return panel together with the matching
    position tensor and stores the decoded stock expected returns for the
    most recent date; ``predict`` maps any holdings matrix onto the fitted
    returns, giving the model-implied expected return of each portfolio.

    Parameters
    ----------
    k : int, default=0
        Residual covariance components absorbed into the regression weights.
        0 keeps plain inverse residual variances, negative chooses the count
        by effective rank.
    tol : float, default=1e-8
        Relative eigenvalue cut for the weighted Gram matrix (and the
        constraint machinery when constraints are in play).
    weight_mode : {"plain", "cov_kfactor", "corr_kfactor"}, default="cov_kfactor"
        Matrix whose principal components are stripped from the residual
        variances.
    rounding : {"trunc", "round"}, default="trunc"
        How an effective-rank-chosen ``k`` becomes an integer.
    method : {"pca", "elimination"}, default="pca"
        Constraint handling: spectral truncation of the weighted Gram matrix,
        or the explicit stock-elimination reduction (requires constraints).
    constraints : None, "discover", ConstraintMatrix or array, default=None
        Known linear constraints on the alpha portfolios, or "discover" to
        recover them from the common null space of the positions.

    Attributes
    ----------
    expected_returns_ : ndarray of shape (n_stocks,)
        Decoded stock expected returns for the most recent date.
    stock_ids_ : tuple of str
    regression_weights_ : ndarray of shape (n_alphas,)
    k_used_ : int
        Component count actually used for the weights.
    gram_eigenvalues_ : ndarray
        Spectrum of the weighted Gram matrix (descending); empty for the
        elimination route.
    n_retained_ : int
        Eigenvalues above the truncation cut.
    constraints_ : ConstraintMatrix or None
        The constraints in force (supplied or discovered).
    constraint_residual_ : float or None
        ``max |Q^T E|`` when constraints are in force.
    """

    def __init__(
        self,
        k: int = 0,
        tol: float = 1e-8,
        weight_mode: str = "cov_kfactor",
        rounding: str = "trunc",
        method: str = "pca",
        constraints=None,
    ):
        self.k = k
        self.tol = tol
        self.weight_mode = weight_mode
        self.rounding = rounding
        self.method = method
        self.constraints = constraints

    def fit(self, returns, positions):
        """Run the decoding pipeline and store the results.

        Parameters
        ----------
        returns : AlphaReturnPanel or array_like of shape (n_alphas, n_dates)
        positions : PositionTensor or array_like of shape
            (n_alphas, n_stocks, n_dates)

        Returns
        -------
        self
        """
        panel = as_return_panel(returns)
        tensor = as_position_tensor(positions)
        if tensor.n_alphas != panel.n_alphas or tensor.n_dates != panel.n_dates:
            raise ValidationError(
                f"positions {tensor.values.shape} inconsistent with panel "
                f"{panel.values.shape}"
            )

        constraints = self._resolve_constraints(tensor)
        if self.method == "elimination":
            if constraints is None:
                raise ValidationError(
                    "method='elimination' needs constraints (or 'discover')"
                )
            decoded = decode_via_elimination(
                panel,
                tensor,
                constraints,
                k=self.k,
                tol=self.tol,
                weight_mode=self.weight_mode,
                rounding=self.rounding,
            )
            values = decoded.values
            self.gram_eigenvalues_ = np.empty(0)
            self.n_retained_ = tensor.n_stocks - constraints.n_constraints
            self.regression_weights_ = None
            self.k_used_ = None
        elif self.method == "pca":
            values, info = decode_arrays(
                panel.values,
                tensor.values,
                k=self.k,
                tol=self.tol,
                weight_mode=self.weight_mode,
                rounding=self.rounding,
            )
            self.gram_eigenvalues_ = info.gram.eigen.values
            self.n_retained_ = info.gram.n_retained
            self.regression_weights_ = info.weights.v
            self.k_used_ = info.k_used
        else:
            raise ValidationError(
                f"unknown method {self.method!r}; use 'pca' or 'elimination'"
            )

        self.expected_returns_ = values
        self.stock_ids_ = tensor.stock_ids
        self.alpha_ids_ = tensor.alpha_ids
        self.n_alphas_ = tensor.n_alphas
        self.n_dates_ = tensor.n_dates
        self.constraints_ = constraints
        if constraints is not None and constraints.n_constraints > 0:
            self.constraint_residual_ = float(
                np.abs(constraints.values.T @ values).max()
            )
        else:
            self.constraint_residual_ = None
        return self

    def predict(self, positions):
        """Expected return of each holdings row under the fitted stock returns."""
        check_is_fitted(self, "expected_returns_")
        p = np.asarray(positions, dtype=float)
        if p.ndim != 2 or p.shape[1] != self.expected_returns_.size:
            raise ValidationError(
                f"holdings shape {p.shape} inconsistent with "
                f"{self.expected_returns_.size} stocks"
            )
        return p @ self.expected_returns_

    def _resolve_constraints(self, tensor) -> ConstraintMatrix | None:
        if self.constraints is None:
            return None
        if isinstance(self.constraints, str):
            if self.constraints != "discover":
                raise ValidationError(
                    f"unknown constraints spec {self.constraints!r}"
                )
            found = discover_constraints(tensor, self.tol)
            return found if found.n_constraints > 0 else None
        constraints = as_constraint_matrix(self.constraints, tensor.stock_ids)
        report = validate_constraints(tensor, constraints, self.tol)
        if not report.passed:
            from .errors import ConstraintViolated

            raise ConstraintViolated(
                f"constraints violated: max residual {report.max_residual:.3e} "
                f"> tol {self.tol:g}"
            )
        return constraints
