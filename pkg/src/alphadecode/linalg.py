"""Dense symmetric eigendecomposition, the Gram-matrix route to eigenpairs of
tall sample covariances, Cholesky factorization, and weighted least squares.

These are the kernels every other module builds on.  All functions are pure,
deterministic for identical input bytes, and fix eigenvector signs so results
are comparable across runs and implementations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AsymmetricMatrix,
    BadWeight,
    NotPositiveDefinite,
    Underdetermined,
    ValidationError,
    ZeroSpectrum,
)

__all__ = [
    "EigenSystem",
    "WlsSolution",
    "sym_eigen",
    "eigen_low_rank",
    "cholesky",
    "wls_no_intercept",
]


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues in descending order paired with orthonormal eigenvectors.

    ``vectors[:, j]`` belongs to ``values[j]``.  The component of largest
    magnitude in each eigenvector is positive.
    """

    values: np.ndarray
    vectors: np.ndarray

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class WlsSolution:
    """Weighted least-squares fit: ``residuals = observations - fitted``."""

    coefficients: np.ndarray
    residuals: np.ndarray
    fitted: np.ndarray


def _as_symmetric(a, rtol: float, who: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise AsymmetricMatrix(f"{who}: expected a square matrix, got shape {a.shape}")
    scale = float(np.abs(a).max()) if a.size else 0.0
    if scale > 0.0 and float(np.abs(a - a.T).max()) > rtol * scale:
        raise AsymmetricMatrix(
            f"{who}: matrix is asymmetric beyond relative tolerance {rtol:g}"
        )
    # Exact symmetrization keeps eigh deterministic for near-symmetric input.
    return 0.5 * (a + a.T)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip eigenvector signs so the largest-magnitude component is positive."""
    if vectors.size == 0:
        return vectors
    lead = np.abs(vectors).argmax(axis=0)
    signs = np.sign(vectors[lead, np.arange(vectors.shape[1])])
    signs[signs == 0.0] = 1.0
    return vectors * signs


def sym_eigen(a, *, rtol: float = 1e-10) -> EigenSystem:
    """Full eigendecomposition of a symmetric matrix.

    Parameters
    ----------
    a : array_like of shape (m, m)
        Symmetric within ``rtol`` relative tolerance.

    Returns
    -------
    EigenSystem
        All ``m`` eigenpairs, eigenvalues descending.

    Raises
    ------
    AsymmetricMatrix
        If the input departs from symmetry beyond tolerance.
    """
    a = _as_symmetric(a, rtol, "sym_eigen")
    values, vectors = np.linalg.eigh(a)
    values = values[::-1].copy()
    vectors = np.ascontiguousarray(vectors[:, ::-1])
    return EigenSystem(values, _fix_signs(vectors))


def eigen_low_rank(x, *, demean_rows: bool = True) -> EigenSystem:
    """Positive eigenpairs of the n-by-n sample covariance of the rows of ``x``
    without ever forming the n-by-n matrix.

    For an n-by-p input the covariance is ``C = X_c X_c^T / (p - 1)`` with
    ``X_c`` the (optionally row-demeaned) data.  The p-by-p Gram matrix
    ``X_c^T X_c`` has the same positive spectrum: its eigenpairs ``(mu, w)``
    map to ``(mu / (p - 1), X_c w / ||X_c w||)``.  At most ``min(n, p - 1)``
    pairs exist after demeaning (``min(n, p)`` without), so the work scales
    with p rather than n.

    Raises
    ------
    ZeroSpectrum
        If the (demeaned) input carries no positive spectrum at all.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValidationError(f"expected a 2-d array, got shape {x.shape}")
    n, p = x.shape
    if n < 2 or p < 2:
        raise ValidationError(f"need at least a 2x2 input, got {x.shape}")
    xc = x - x.mean(axis=1, keepdims=True) if demean_rows else x
    gram = xc.T @ xc
    gram = 0.5 * (gram + gram.T)
    mu, w = np.linalg.eigh(gram)
    mu = mu[::-1]
    w = w[:, ::-1]
    max_pairs = min(n, p - 1) if demean_rows else min(n, p)
    cutoff = p * np.finfo(float).eps * max(float(mu[0]), 0.0)
    keep = int(np.searchsorted(-mu, -cutoff))  # mu is descending
    keep = min(keep, max_pairs)
    if keep == 0:
        raise ZeroSpectrum("input has no positive spectrum")
    mu = mu[:keep]
    w = w[:, :keep]
    vectors = xc @ w
    vectors /= np.linalg.norm(vectors, axis=0)
    values = mu / (p - 1)
    return EigenSystem(values.copy(), _fix_signs(vectors))


def cholesky(a, *, rtol: float = 1e-10) -> np.ndarray:
    """Lower-triangular factor L with ``L @ L.T == a``.

    Raises ``NotPositiveDefinite`` when the factorization fails, which doubles
    as the positive-definiteness check for risk models.
    """
    a = _as_symmetric(a, rtol, "cholesky")
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(
            "Cholesky factorization failed: matrix is not positive definite"
        ) from None


def truncated_spectral_solve(
    eig: EigenSystem, rhs: np.ndarray, tol: float
) -> tuple[np.ndarray, int]:
    """Apply the pseudo-inverse built from eigenvalues above ``tol * lambda_max``.

    Returns the solution together with the number of retained eigenvalues.
    Raises ``ZeroSpectrum`` when nothing survives the cut.
    """
    values, vectors = eig.values, eig.vectors
    if values.size == 0 or values[0] <= 0.0:
        raise ZeroSpectrum("no positive eigenvalue to invert")
    kept = values > tol * values[0]
    if not kept.any():
        raise ZeroSpectrum("all eigenvalues fall below the truncation cut")
    vk = vectors[:, kept]
    return vk @ ((vk.T @ rhs) / values[kept]), int(kept.sum())


def wls_no_intercept(y, loadings, weights, *, tol: float = 1e-12) -> WlsSolution:
    """Weighted least squares without an intercept.

    Minimizes ``sum_i v_i (y_i - sum_a L_ia c_a)^2``.  The weighted Gram
    matrix ``L^T V L`` is inverted through its eigendecomposition with
    eigenvalues at or below ``tol * lambda_max`` discarded, so exactly
    collinear loadings are handled by projection instead of failure.

    Parameters
    ----------
    y : array_like of shape (n,)
    loadings : array_like of shape (n, m)
    weights : array_like of shape (n,)
        Strictly positive.

    Raises
    ------
    BadWeight
        If any weight is not strictly positive.
    Underdetermined
        If ``n < m``.
    """
    y = np.asarray(y, dtype=float).ravel()
    L = np.asarray(loadings, dtype=float)
    v = np.asarray(weights, dtype=float).ravel()
    if L.ndim != 2:
        raise ValidationError(f"loadings must be 2-d, got shape {L.shape}")
    n, m = L.shape
    if y.size != n or v.size != n:
        raise ValidationError(
            f"inconsistent sizes: y has {y.size}, loadings {n} rows, weights {v.size}"
        )
    if not (v > 0.0).all():
        raise BadWeight("weights must be strictly positive")
    if n < m:
        raise Underdetermined(f"{n} observations cannot fit {m} coefficients")
    vl = v[:, None] * L
    gram = L.T @ vl
    gram = 0.5 * (gram + gram.T)
    rhs = vl.T @ y
    eig = sym_eigen(gram)
    coefficients, _ = truncated_spectral_solve(eig, rhs, tol)
    fitted = L @ coefficients
    return WlsSolution(coefficients, y - fitted, fitted)
