"""Data model, file ingestion, and validation for alpha return panels,
position tensors, constraint matrices, and stock risk models.

Date convention everywhere: date index 1 is the most recent date and larger
indices are older.  Text formats are decimal CSV written with 17 significant
digits so float64 values round-trip bit-exactly; writers emit the date
convention as a leading ``#`` comment line and readers skip such lines.

All objects are validated at construction and immutable afterwards, so they
are safe to share across parallel workers.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    AsymmetricMatrix,
    EmptyAlphaSlice,
    IncompletePanel,
    NormalizationError,
    NotPositiveDefinite,
    ParseError,
    TooFewDates,
    UntradedStock,
    ValidationError,
)
from .linalg import cholesky

__all__ = [
    "AlphaReturnPanel",
    "PositionTensor",
    "ConstraintMatrix",
    "StockRiskModel",
    "DecodedReturns",
    "ConstraintReport",
    "as_return_panel",
    "as_position_tensor",
    "as_constraint_matrix",
    "as_risk_model",
    "validate_constraints",
    "load_return_panel",
    "save_return_panel",
    "load_position_tensor",
    "save_position_tensor",
    "load_constraint_matrix",
    "save_constraint_matrix",
    "load_risk_model",
    "save_risk_model",
    "load_decoded_returns",
    "save_decoded_returns",
    "save_weight_vector",
]

# L1 norms of position slices must match 1 this closely unless the caller
# explicitly asks for renormalization.
L1_TOLERANCE = 1e-9

_DATE_COMMENT = "# date_index 1 = most recent date; larger indices are older"


def default_alpha_ids(n: int) -> tuple[str, ...]:
    return tuple(f"a{i + 1:05d}" for i in range(n))


def default_stock_ids(m: int) -> tuple[str, ...]:
    return tuple(f"S{a + 1:04d}" for a in range(m))


def _freeze(values: np.ndarray) -> np.ndarray:
    out = np.array(values, dtype=float, copy=True)
    out.flags.writeable = False
    return out


def _require_finite(values: np.ndarray, what: str) -> None:
    if not np.isfinite(values).all():
        raise ValidationError(f"{what} contains non-finite entries")


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AlphaReturnPanel:
    """N-by-d panel of alpha returns; column 0 holds the most recent date."""

    values: np.ndarray
    alpha_ids: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise ValidationError(f"return panel must be 2-d, got shape {values.shape}")
        n, d = values.shape
        if n < 1:
            raise ValidationError("return panel needs at least one alpha")
        if d < 3:
            raise TooFewDates(f"return panel needs at least 3 dates, got {d}")
        if len(self.alpha_ids) != n:
            raise ValidationError(
                f"{len(self.alpha_ids)} alpha ids for {n} panel rows"
            )
        _require_finite(values, "return panel")
        object.__setattr__(self, "values", _freeze(values))
        object.__setattr__(self, "alpha_ids", tuple(str(a) for a in self.alpha_ids))

    @property
    def n_alphas(self) -> int:
        return self.values.shape[0]

    @property
    def n_dates(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class PositionTensor:
    """N-by-M-by-d desired holdings, each (alpha, date) slice L1-normalized."""

    values: np.ndarray
    stock_ids: tuple[str, ...]
    alpha_ids: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 3:
            raise ValidationError(f"position tensor must be 3-d, got shape {values.shape}")
        n, m, d = values.shape
        if n < 1 or m < 1 or d < 1:
            raise ValidationError(f"degenerate position tensor shape {values.shape}")
        if len(self.stock_ids) != m:
            raise ValidationError(f"{len(self.stock_ids)} stock ids for {m} stocks")
        if len(self.alpha_ids) != n:
            raise ValidationError(f"{len(self.alpha_ids)} alpha ids for {n} alphas")
        _require_finite(values, "position tensor")
        norms = np.abs(values).sum(axis=1)  # (n, d)
        if (norms == 0.0).any():
            i, s = np.argwhere(norms == 0.0)[0]
            raise EmptyAlphaSlice(
                f"alpha {self.alpha_ids[i]!r} holds nothing at date index {s + 1}"
            )
        off = np.abs(norms - 1.0)
        if (off > L1_TOLERANCE).any():
            i, s = np.unravel_index(int(off.argmax()), off.shape)
            raise NormalizationError(
                f"alpha {self.alpha_ids[i]!r} at date index {s + 1} has L1 norm "
                f"{norms[i, s]:.12g}; pass renormalize=True to rescale"
            )
        held = np.abs(values).sum(axis=(0, 2))  # per stock
        if (held == 0.0).any():
            a = int(np.flatnonzero(held == 0.0)[0])
            raise UntradedStock(
                f"stock {self.stock_ids[a]!r} is held by no alpha on any date"
            )
        object.__setattr__(self, "values", _freeze(values))
        object.__setattr__(self, "stock_ids", tuple(str(s) for s in self.stock_ids))
        object.__setattr__(self, "alpha_ids", tuple(str(a) for a in self.alpha_ids))

    @property
    def n_alphas(self) -> int:
        return self.values.shape[0]

    @property
    def n_stocks(self) -> int:
        return self.values.shape[1]

    @property
    def n_dates(self) -> int:
        return self.values.shape[2]


@dataclass(frozen=True)
class ConstraintMatrix:
    """M-by-p matrix whose columns span the alpha portfolios' neutral directions."""

    values: np.ndarray
    stock_ids: tuple[str, ...] | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise ValidationError(f"constraint matrix must be 2-d, got shape {values.shape}")
        m, p = values.shape
        if p >= m:
            raise ValidationError(f"need p < M, got {p} constraints on {m} stocks")
        _require_finite(values, "constraint matrix")
        if p > 0:
            sv = np.linalg.svd(values, compute_uv=False)
            if sv[-1] <= 1e-10 * sv[0]:
                raise ValidationError("constraint columns are linearly dependent")
        if self.stock_ids is not None and len(self.stock_ids) != m:
            raise ValidationError(
                f"{len(self.stock_ids)} stock ids for {m} constraint rows"
            )
        object.__setattr__(self, "values", _freeze(values))
        if self.stock_ids is not None:
            object.__setattr__(self, "stock_ids", tuple(str(s) for s in self.stock_ids))

    @property
    def n_constraints(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class StockRiskModel:
    """Symmetric positive-definite M-by-M covariance for stocks.

    The Cholesky factor is computed eagerly; a failing factorization rejects
    the model at construction.
    """

    covariance: np.ndarray
    stock_ids: tuple[str, ...] | None = None
    cholesky_factor: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        cov = np.asarray(self.covariance, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
            raise AsymmetricMatrix(f"covariance must be square, got shape {cov.shape}")
        _require_finite(cov, "risk model covariance")
        scale = float(np.abs(cov).max()) if cov.size else 0.0
        if scale > 0.0 and float(np.abs(cov - cov.T).max()) > 1e-12 * scale:
            raise AsymmetricMatrix("covariance is asymmetric beyond 1e-12 relative")
        cov = 0.5 * (cov + cov.T)
        factor = cholesky(cov)  # raises NotPositiveDefinite
        if self.stock_ids is not None and len(self.stock_ids) != cov.shape[0]:
            raise ValidationError(
                f"{len(self.stock_ids)} stock ids for {cov.shape[0]} stocks"
            )
        object.__setattr__(self, "covariance", _freeze(cov))
        object.__setattr__(self, "cholesky_factor", _freeze(factor))
        if self.stock_ids is not None:
            object.__setattr__(self, "stock_ids", tuple(str(s) for s in self.stock_ids))

    @property
    def n_stocks(self) -> int:
        return self.covariance.shape[0]


@dataclass(frozen=True)
class DecodedReturns:
    """Expected returns for stocks at the most recent date."""

    values: np.ndarray
    stock_ids: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        _require_finite(values, "decoded returns")
        if len(self.stock_ids) != values.size:
            raise ValidationError(
                f"{len(self.stock_ids)} stock ids for {values.size} decoded returns"
            )
        object.__setattr__(self, "values", _freeze(values))
        object.__setattr__(self, "stock_ids", tuple(str(s) for s in self.stock_ids))


# ---------------------------------------------------------------------------
# coercion helpers
# ---------------------------------------------------------------------------

def as_return_panel(obj) -> AlphaReturnPanel:
    """Pass through a panel or validate a raw N-by-d array into one."""
    if isinstance(obj, AlphaReturnPanel):
        return obj
    values = np.asarray(obj, dtype=float)
    if values.ndim != 2:
        raise ValidationError(f"return panel must be 2-d, got shape {values.shape}")
    return AlphaReturnPanel(values, default_alpha_ids(values.shape[0]))


def as_position_tensor(obj, *, renormalize: bool = False) -> PositionTensor:
    """Pass through a tensor or validate a raw N-by-M-by-d array into one."""
    if isinstance(obj, PositionTensor):
        return obj
    values = np.asarray(obj, dtype=float)
    if values.ndim != 3:
        raise ValidationError(f"position tensor must be 3-d, got shape {values.shape}")
    if renormalize:
        values = renormalize_positions(values)
    n, m, _ = values.shape
    return PositionTensor(values, default_stock_ids(m), default_alpha_ids(n))


def as_constraint_matrix(obj, stock_ids=None) -> ConstraintMatrix:
    if isinstance(obj, ConstraintMatrix):
        return obj
    return ConstraintMatrix(np.asarray(obj, dtype=float), stock_ids)


def as_risk_model(obj, stock_ids=None) -> StockRiskModel:
    if isinstance(obj, StockRiskModel):
        return obj
    return StockRiskModel(np.asarray(obj, dtype=float), stock_ids)


def renormalize_positions(values: np.ndarray) -> np.ndarray:
    """Divide every (alpha, date) slice by its L1 norm.

    Raises ``EmptyAlphaSlice`` if any slice is identically zero.
    """
    values = np.asarray(values, dtype=float)
    _require_finite(values, "position tensor")
    norms = np.abs(values).sum(axis=1)
    if (norms == 0.0).any():
        i, s = np.argwhere(norms == 0.0)[0]
        raise EmptyAlphaSlice(
            f"alpha index {i} holds nothing at date index {s + 1}; cannot renormalize"
        )
    return values / norms[:, None, :]


# ---------------------------------------------------------------------------
# constraint validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstraintReport:
    """Result of checking positions against a constraint matrix."""

    max_residual: float
    tol: float
    passed: bool
    worst_alpha_index: int | None = None
    worst_alpha_id: str | None = None
    worst_date_index: int | None = None
    worst_constraint_index: int | None = None


def validate_constraints(positions, constraints, tol: float = 1e-9) -> ConstraintReport:
    """Report how well every (alpha, date) slice annihilates the constraints.

    The residual is ``max over (i, s, alpha) of |sum_A P_iAs Q_Aalpha|``,
    compared directly against ``tol``.  Report only; never raises on failure.
    """
    tensor = as_position_tensor(positions)
    q = as_constraint_matrix(constraints, tensor.stock_ids)
    if q.values.shape[0] != tensor.n_stocks:
        raise ValidationError(
            f"constraint matrix has {q.values.shape[0]} rows for "
            f"{tensor.n_stocks} stocks"
        )
    if q.n_constraints == 0:
        return ConstraintReport(0.0, tol, True)
    res = np.einsum("ims,mp->isp", tensor.values, q.values)
    worst = np.abs(res)
    i, s, a = np.unravel_index(int(worst.argmax()), worst.shape)
    max_residual = float(worst[i, s, a])
    return ConstraintReport(
        max_residual,
        tol,
        max_residual <= tol,
        worst_alpha_index=int(i),
        worst_alpha_id=tensor.alpha_ids[i],
        worst_date_index=int(s) + 1,
        worst_constraint_index=int(a) + 1,
    )


# ---------------------------------------------------------------------------
# CSV helpers
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _read_csv_rows(path) -> list[tuple[int, list[str]]]:
    """All non-comment, non-blank rows as (line_number, fields)."""
    rows: list[tuple[int, list[str]]] = []
    with open(path, "r", newline="") as handle:
        for lineno, line in enumerate(handle, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            rows.append((lineno, next(csv.reader([line]))))
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return rows


def _parse_float(text: str, path, lineno: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"{path}:{lineno}: expected a number, got {text!r}") from None


def _parse_date_index(text: str, path, lineno: int) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ParseError(
            f"{path}:{lineno}: expected an integer date index, got {text!r}"
        ) from None
    if value < 1:
        raise ParseError(f"{path}:{lineno}: date index must be >= 1, got {value}")
    return value


# ---------------------------------------------------------------------------
# return panels
# ---------------------------------------------------------------------------

def load_return_panel(path, layout: str = "wide") -> AlphaReturnPanel:
    """Load an alpha return panel from CSV.

    Parameters
    ----------
    path : path-like
    layout : {"wide", "long"}
        Wide: header ``alpha_id,s1,...,sd``, one row per alpha, left-most
        numeric column is the most recent date.  Long: header
        ``alpha_id,date_index,value`` with every (alpha, date) pair present.

    Raises
    ------
    ParseError, IncompletePanel, TooFewDates
    """
    if layout == "wide":
        return _load_return_panel_wide(path)
    if layout == "long":
        return _load_return_panel_long(path)
    raise ValidationError(f"unknown layout {layout!r}; use 'wide' or 'long'")


def _load_return_panel_wide(path) -> AlphaReturnPanel:
    rows = _read_csv_rows(path)
    header_line, header = rows[0]
    if len(header) < 2 or header[0] != "alpha_id":
        raise ParseError(f"{path}:{header_line}: expected header 'alpha_id,s1,...'")
    d = len(header) - 1
    ids: list[str] = []
    data: list[list[float]] = []
    for lineno, fields in rows[1:]:
        if len(fields) != d + 1:
            raise ParseError(
                f"{path}:{lineno}: expected {d + 1} fields, got {len(fields)}"
            )
        ids.append(fields[0])
        data.append([_parse_float(cell, path, lineno) for cell in fields[1:]])
    if not data:
        raise ParseError(f"{path}: no alpha rows")
    return AlphaReturnPanel(np.array(data, dtype=float), tuple(ids))


def _load_return_panel_long(path) -> AlphaReturnPanel:
    rows = _read_csv_rows(path)
    header_line, header = rows[0]
    if header != ["alpha_id", "date_index", "value"]:
        raise ParseError(
            f"{path}:{header_line}: expected header 'alpha_id,date_index,value'"
        )
    cells: dict[tuple[str, int], float] = {}
    ids: list[str] = []
    seen: set[str] = set()
    max_date = 0
    for lineno, fields in rows[1:]:
        if len(fields) != 3:
            raise ParseError(f"{path}:{lineno}: expected 3 fields, got {len(fields)}")
        alpha = fields[0]
        date = _parse_date_index(fields[1], path, lineno)
        value = _parse_float(fields[2], path, lineno)
        if (alpha, date) in cells:
            raise ParseError(
                f"{path}:{lineno}: duplicate cell for alpha {alpha!r}, date {date}"
            )
        if alpha not in seen:
            seen.add(alpha)
            ids.append(alpha)
        cells[(alpha, date)] = value
        max_date = max(max_date, date)
    missing = [
        (alpha, date)
        for alpha in ids
        for date in range(1, max_date + 1)
        if (alpha, date) not in cells
    ]
    if missing:
        alpha, date = missing[0]
        raise IncompletePanel(
            f"{path}: missing {len(missing)} cells, first is alpha {alpha!r} "
            f"at date {date}"
        )
    values = np.array(
        [[cells[(alpha, date)] for date in range(1, max_date + 1)] for alpha in ids]
    )
    return AlphaReturnPanel(values, tuple(ids))


def save_return_panel(panel: AlphaReturnPanel, path, layout: str = "wide") -> None:
    """Write a return panel as CSV (17 significant digits, bit-exact reload)."""
    panel = as_return_panel(panel)
    with open(path, "w", newline="") as handle:
        handle.write(_DATE_COMMENT + "\n")
        writer = csv.writer(handle)
        if layout == "wide":
            writer.writerow(["alpha_id"] + [f"s{j + 1}" for j in range(panel.n_dates)])
            for i, alpha in enumerate(panel.alpha_ids):
                writer.writerow([alpha] + [_fmt(x) for x in panel.values[i]])
        elif layout == "long":
            writer.writerow(["alpha_id", "date_index", "value"])
            for i, alpha in enumerate(panel.alpha_ids):
                for j in range(panel.n_dates):
                    writer.writerow([alpha, j + 1, _fmt(panel.values[i, j])])
        else:
            raise ValidationError(f"unknown layout {layout!r}")


# ---------------------------------------------------------------------------
# position tensors
# ---------------------------------------------------------------------------

def load_position_tensor(path, *, renormalize: bool = False) -> PositionTensor:
    """Load desired holdings from a long CSV.

    Header ``alpha_id,stock_id,date_index,position``; triples absent from the
    file are positions of exactly zero.  Every (alpha, date) slice must have
    unit L1 norm unless ``renormalize`` is set, in which case each slice is
    divided by its norm.

    Raises
    ------
    ParseError, EmptyAlphaSlice, NormalizationError, UntradedStock
    """
    rows = _read_csv_rows(path)
    header_line, header = rows[0]
    if header != ["alpha_id", "stock_id", "date_index", "position"]:
        raise ParseError(
            f"{path}:{header_line}: expected header "
            "'alpha_id,stock_id,date_index,position'"
        )
    alpha_ids: list[str] = []
    stock_ids: list[str] = []
    alpha_pos: dict[str, int] = {}
    stock_pos: dict[str, int] = {}
    entries: list[tuple[int, int, int, float]] = []
    max_date = 0
    for lineno, fields in rows[1:]:
        if len(fields) != 4:
            raise ParseError(f"{path}:{lineno}: expected 4 fields, got {len(fields)}")
        alpha, stock = fields[0], fields[1]
        date = _parse_date_index(fields[2], path, lineno)
        value = _parse_float(fields[3], path, lineno)
        if alpha not in alpha_pos:
            alpha_pos[alpha] = len(alpha_ids)
            alpha_ids.append(alpha)
        if stock not in stock_pos:
            stock_pos[stock] = len(stock_ids)
            stock_ids.append(stock)
        entries.append((alpha_pos[alpha], stock_pos[stock], date, value))
        max_date = max(max_date, date)
    values = np.zeros((len(alpha_ids), len(stock_ids), max_date))
    for i, a, date, value in entries:
        values[i, a, date - 1] = value
    if renormalize:
        values = renormalize_positions(values)
    return PositionTensor(values, tuple(stock_ids), tuple(alpha_ids))


def save_position_tensor(tensor: PositionTensor, path) -> None:
    """Write holdings as a long CSV, omitting exact zeros."""
    tensor = as_position_tensor(tensor)
    with open(path, "w", newline="") as handle:
        handle.write(_DATE_COMMENT + "\n")
        writer = csv.writer(handle)
        writer.writerow(["alpha_id", "stock_id", "date_index", "position"])
        values = tensor.values
        for i, alpha in enumerate(tensor.alpha_ids):
            for s in range(tensor.n_dates):
                nonzero = np.flatnonzero(values[i, :, s])
                for a in nonzero:
                    writer.writerow(
                        [alpha, tensor.stock_ids[a], s + 1, _fmt(values[i, a, s])]
                    )


# ---------------------------------------------------------------------------
# constraint matrices
# ---------------------------------------------------------------------------

def load_constraint_matrix(path, stock_ids=None) -> ConstraintMatrix:
    """Load a constraint matrix (header ``stock_id,c1,...,cp``).

    When ``stock_ids`` is given, rows are reordered to match and the id sets
    must agree exactly.
    """
    rows = _read_csv_rows(path)
    header_line, header = rows[0]
    if len(header) < 1 or header[0] != "stock_id":
        raise ParseError(f"{path}:{header_line}: expected header 'stock_id,c1,...'")
    p = len(header) - 1
    ids: list[str] = []
    data: list[list[float]] = []
    for lineno, fields in rows[1:]:
        if len(fields) != p + 1:
            raise ParseError(
                f"{path}:{lineno}: expected {p + 1} fields, got {len(fields)}"
            )
        ids.append(fields[0])
        data.append([_parse_float(cell, path, lineno) for cell in fields[1:]])
    values = np.array(data, dtype=float).reshape(len(ids), p)
    if stock_ids is not None:
        values = _reorder_rows(values, ids, stock_ids, path)
        ids = list(stock_ids)
    return ConstraintMatrix(values, tuple(ids))


def save_constraint_matrix(constraints: ConstraintMatrix, path) -> None:
    q = constraints
    ids = q.stock_ids or default_stock_ids(q.values.shape[0])
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["stock_id"] + [f"c{j + 1}" for j in range(q.n_constraints)])
        for a, stock in enumerate(ids):
            writer.writerow([stock] + [_fmt(x) for x in q.values[a]])


def _reorder_rows(values, row_ids, wanted_ids, path):
    index = {s: i for i, s in enumerate(row_ids)}
    if set(row_ids) != set(wanted_ids):
        raise ValidationError(
            f"{path}: stock ids do not match the position universe"
        )
    order = [index[s] for s in wanted_ids]
    return values[order]


# ---------------------------------------------------------------------------
# stock risk models
# ---------------------------------------------------------------------------

def load_risk_model(path, stock_ids=None) -> StockRiskModel:
    """Load an M-by-M covariance CSV with a stock_id header row and column."""
    rows = _read_csv_rows(path)
    header_line, header = rows[0]
    if len(header) < 2 or header[0] != "stock_id":
        raise ParseError(f"{path}:{header_line}: expected header 'stock_id,<ids...>'")
    col_ids = header[1:]
    m = len(col_ids)
    row_ids: list[str] = []
    data: list[list[float]] = []
    for lineno, fields in rows[1:]:
        if len(fields) != m + 1:
            raise ParseError(
                f"{path}:{lineno}: expected {m + 1} fields, got {len(fields)}"
            )
        row_ids.append(fields[0])
        data.append([_parse_float(cell, path, lineno) for cell in fields[1:]])
    if row_ids != col_ids:
        raise ParseError(f"{path}: row ids do not match the header ids")
    values = np.array(data, dtype=float)
    if stock_ids is not None:
        values = _reorder_rows(values, row_ids, stock_ids, path)
        values = _reorder_rows(values.T, row_ids, stock_ids, path).T
        row_ids = list(stock_ids)
    return StockRiskModel(values, tuple(row_ids))


def save_risk_model(model: StockRiskModel, path) -> None:
    ids = model.stock_ids or default_stock_ids(model.n_stocks)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["stock_id"] + list(ids))
        for a, stock in enumerate(ids):
            writer.writerow([stock] + [_fmt(x) for x in model.covariance[a]])


# ---------------------------------------------------------------------------
# decoded returns and weight vectors
# ---------------------------------------------------------------------------

def save_decoded_returns(decoded: DecodedReturns, path) -> None:
    save_weight_vector(decoded.values, decoded.stock_ids, path, "expected_return")


def load_decoded_returns(path) -> DecodedReturns:
    rows = _read_csv_rows(path)
    header_line, header = rows[0]
    if header[:1] != ["stock_id"] or len(header) != 2:
        raise ParseError(
            f"{path}:{header_line}: expected header 'stock_id,expected_return'"
        )
    ids: list[str] = []
    data: list[float] = []
    for lineno, fields in rows[1:]:
        if len(fields) != 2:
            raise ParseError(f"{path}:{lineno}: expected 2 fields, got {len(fields)}")
        ids.append(fields[0])
        data.append(_parse_float(fields[1], path, lineno))
    return DecodedReturns(np.array(data, dtype=float), tuple(ids))


def save_weight_vector(values, ids, path, column: str, id_column: str = "stock_id") -> None:
    """Write an id/value CSV (used for expected returns and weight outputs)."""
    values = np.asarray(values, dtype=float).ravel()
    if len(ids) != values.size:
        raise ValidationError(f"{len(ids)} ids for {values.size} values")
    path = Path(path)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([id_column, column])
        for name, value in zip(ids, values):
            writer.writerow([name, _fmt(value)])
