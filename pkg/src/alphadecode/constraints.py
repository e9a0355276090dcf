"""Linear-constraint handling for position data.

Alphas subject to shared linear constraints (dollar neutrality, sector
neutrality, ...) never trade p directions of the stock space, so only M - p
combinations of stock returns can be decoded.  This module offers both ways
to deal with that: discovering the constraints from the positions, and the
elimination scan that removes one stock per constraint to leave an
unconstrained reduced problem whose solution maps back linearly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decoder import decode_arrays
from .errors import ConstraintViolated, DegenerateConstraintSplit, ValidationError
from .panels import (
    ConstraintMatrix,
    DecodedReturns,
    as_constraint_matrix,
    as_position_tensor,
    validate_constraints,
)

__all__ = [
    "Elimination",
    "eliminate",
    "discover_constraints",
    "decode_via_elimination",
]


@dataclass(frozen=True)
class Elimination:
    """Result of the constraint-elimination scan.

    ``kept`` lists the M - p stocks of the reduced problem and ``removed``
    the p stocks whose returns are reconstructed as
    ``E_removed = -chi @ E_kept``.  ``reduced_positions`` are the holdings
    re-expressed on the kept stocks only; for any return vector annihilated
    by the constraints they reproduce every alpha's exposure exactly.
    """

    kept: tuple[int, ...]
    removed: tuple[int, ...]
    chi: np.ndarray
    reduced_positions: np.ndarray

    @property
    def n_removed(self) -> int:
        return len(self.removed)


def discover_constraints(positions, tol: float = 1e-8) -> ConstraintMatrix:
    """Orthonormal basis of the common null space of all position rows.

    Stacks every (alpha, date) holding row into one matrix and keeps the
    right-singular directions with singular value below ``tol`` times the
    largest.  Returns a possibly empty (p = 0) constraint matrix.
    """
    tensor = as_position_tensor(positions)
    stacked = tensor.values.transpose(0, 2, 1).reshape(-1, tensor.n_stocks)
    m = tensor.n_stocks
    # Full matrices only when the stack is shorter than the universe; the
    # thin factorization already delivers all m right-singular directions
    # otherwise, and a full left factor would be enormous.
    _, sv, vt = np.linalg.svd(stacked, full_matrices=stacked.shape[0] < m)
    null = np.zeros(m, dtype=bool)
    null[sv.size:] = True  # directions with no singular value at all
    null[: sv.size] = sv <= tol * sv[0]
    q = vt[null].T
    return ConstraintMatrix(q, tensor.stock_ids)


def eliminate(positions, constraints, tol: float = 1e-8) -> Elimination:
    """Reduce a constrained universe to an unconstrained one on M - p stocks.

    Scans stocks in index order, maintaining the kept set.  Adding stock B
    completes a constraint when some combination of the constraints becomes
    fully supported on the kept stocks plus B, which for exactly satisfied
    constraints happens precisely when B's stacked position column is
    linearly dependent on the kept ones; the dependency coefficients extended
    by zeros are that combination.  The scan therefore keeps B when its
    column extends the span (orthogonal residual above ``tol`` times the
    largest singular value of the stacked positions) and removes it
    otherwise.  Constraint combinations rather than individual columns drive
    the test because the constraints are only defined up to rotation among
    themselves.

    Raises
    ------
    ConstraintViolated
        If the positions do not satisfy the constraints within ``tol``.
    DegenerateConstraintSplit
        If the removed set cannot invert the constraint block, e.g. when the
        positions carry rank deficiencies beyond the supplied constraints.
        The offending split is reported for audit rather than re-scanned.
    """
    tensor = as_position_tensor(positions)
    q = as_constraint_matrix(constraints, tensor.stock_ids)
    if q.values.shape[0] != tensor.n_stocks:
        raise ValidationError(
            f"constraint matrix has {q.values.shape[0]} rows for "
            f"{tensor.n_stocks} stocks"
        )
    report = validate_constraints(tensor, q, tol)
    if not report.passed:
        raise ConstraintViolated(
            f"constraints violated: max residual {report.max_residual:.3e} > tol "
            f"{tol:g} (alpha {report.worst_alpha_id!r}, date "
            f"{report.worst_date_index}, constraint {report.worst_constraint_index})"
        )
    p_values = tensor.values
    n_stocks = tensor.n_stocks
    n_constraints = q.n_constraints
    if n_constraints == 0:
        return Elimination(
            tuple(range(n_stocks)), (), np.zeros((0, n_stocks)), p_values.copy()
        )

    stacked = p_values.transpose(0, 2, 1).reshape(-1, n_stocks)
    sigma_max = float(np.linalg.svd(stacked, compute_uv=False)[0])
    cut = tol * sigma_max

    kept: list[int] = []
    removed: list[int] = []
    basis = np.empty((stacked.shape[0], 0))
    for candidate in range(n_stocks):
        column = stacked[:, candidate]
        residual = column - basis @ (basis.T @ column)
        residual -= basis @ (basis.T @ residual)  # re-orthogonalize once
        norm = float(np.linalg.norm(residual))
        if norm > cut:
            kept.append(candidate)
            basis = np.column_stack([basis, residual / norm])
        else:
            removed.append(candidate)

    q_removed = q.values[removed, :]
    if len(removed) != n_constraints or _rank_deficient(q_removed):
        raise DegenerateConstraintSplit(
            f"scan removed stocks {removed} for {n_constraints} constraints; "
            "the constraint block on the removed stocks is singular"
        )
    k_kept = q.values[kept, :]
    qqt = q_removed @ q_removed.T
    chi = np.linalg.solve(qqt, q_removed @ k_kept.T)
    reduced = p_values[:, kept, :] - np.einsum(
        "ims,ma->ias", p_values[:, removed, :], chi
    )
    return Elimination(tuple(kept), tuple(removed), chi, reduced)


def _rank_deficient(block: np.ndarray) -> bool:
    if block.shape[0] < block.shape[1]:
        return True
    sv = np.linalg.svd(block, compute_uv=False)
    return bool(sv[-1] <= 1e-12 * sv[0])


def decode_via_elimination(
    returns,
    positions,
    constraints,
    k: int = 0,
    tol: float = 1e-8,
    weight_mode: str = "cov_kfactor",
    rounding: str = "trunc",
) -> DecodedReturns:
    """Decode through the elimination route and map back to all M stocks.

    Runs the standard pipeline on the reduced positions (now full rank), then
    reconstructs the removed stocks' returns from the kept ones.  The result
    agrees with the truncated-spectrum route whenever the constraints are
    exactly satisfied.
    """
    from .panels import as_return_panel

    panel = as_return_panel(returns)
    tensor = as_position_tensor(positions)
    if tensor.n_alphas != panel.n_alphas or tensor.n_dates != panel.n_dates:
        raise ValidationError(
            f"positions {tensor.values.shape} inconsistent with panel "
            f"{panel.values.shape}"
        )
    elim = eliminate(tensor, constraints, tol)
    reduced_e, _ = decode_arrays(
        panel.values,
        elim.reduced_positions,
        k=k,
        tol=tol,
        weight_mode=weight_mode,
        rounding=rounding,
    )
    full = np.empty(tensor.n_stocks)
    full[list(elim.kept)] = reduced_e
    if elim.n_removed:
        full[list(elim.removed)] = -elim.chi @ reduced_e
    return DecodedReturns(full, tensor.stock_ids)
