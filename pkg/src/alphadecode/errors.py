"""Exception hierarchy shared across the package.

Every error carries a stable ``exit_code`` so the command line interface can
map failures to distinct process exit statuses.
"""

from __future__ import annotations


class AlphaDecodeError(Exception):
    """Base class for all library errors."""

    exit_code = 10


class ValidationError(AlphaDecodeError):
    """An input violates a structural invariant with no more specific name."""

    exit_code = 31


# --- panel data ------------------------------------------------------------

class ParseError(AlphaDecodeError):
    """A file cell could not be parsed (non-numeric value, bad header, ...)."""

    exit_code = 11


class IncompletePanel(AlphaDecodeError):
    """A long-layout returns file does not cover the full alpha-by-date grid."""

    exit_code = 12


class TooFewDates(AlphaDecodeError):
    """A return panel has fewer dates than the pipeline needs."""

    exit_code = 13


class EmptyAlphaSlice(AlphaDecodeError):
    """Some alpha holds nothing on some date (zero L1 norm)."""

    exit_code = 14


class NormalizationError(AlphaDecodeError):
    """A position slice is not L1-normalized and renormalization was not requested."""

    exit_code = 15


class UntradedStock(AlphaDecodeError):
    """A stock is held by no alpha on any date and must be dropped upstream."""

    exit_code = 16


# --- linear algebra ---------------------------------------------------------

class AsymmetricMatrix(AlphaDecodeError):
    """A matrix required to be symmetric is not, beyond tolerance."""

    exit_code = 17


class NotPositiveDefinite(AlphaDecodeError):
    """Cholesky factorization failed; the matrix is not positive definite."""

    exit_code = 18


class ZeroSpectrum(AlphaDecodeError):
    """A decomposition found no positive eigenvalues to work with."""

    exit_code = 19


class BadWeight(AlphaDecodeError):
    """Regression weights must be strictly positive."""

    exit_code = 20


class Underdetermined(AlphaDecodeError):
    """Fewer observations than coefficients in a regression."""

    exit_code = 21


# --- residual engine --------------------------------------------------------

class DegenerateDate(AlphaDecodeError):
    """All positions vanish on some date; no regression can be run there."""

    exit_code = 22


class TooShort(AlphaDecodeError):
    """A series is too short for the requested statistic."""

    exit_code = 23


class EmptySpectrum(AlphaDecodeError):
    """Effective rank is undefined on a spectrum with no positive entries."""

    exit_code = 24


class BadMultiplier(AlphaDecodeError):
    """Weight multipliers must be strictly positive."""

    exit_code = 25


# --- decoding ---------------------------------------------------------------

class NullGram(AlphaDecodeError):
    """The weighted Gram matrix has no eigenvalue above the truncation cut."""

    exit_code = 26


class ConstraintViolated(AlphaDecodeError):
    """Positions do not satisfy the supplied constraint matrix within tolerance."""

    exit_code = 27


class DegenerateConstraintSplit(AlphaDecodeError):
    """The elimination scan produced a stock split that cannot invert the constraints."""

    exit_code = 28


class ZeroSignal(AlphaDecodeError):
    """Expected returns are identically zero; no weights can be normalized."""

    exit_code = 29


# --- synthetic data ---------------------------------------------------------

class ProjectionFailed(AlphaDecodeError):
    """Constrained position generation did not converge."""

    exit_code = 30
