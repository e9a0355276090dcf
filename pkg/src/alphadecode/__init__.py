"""Decode stock expected returns directly from alpha expected returns.

Given a panel of alpha expected returns and the matching desired-holdings
tensor, the package recovers expected returns for the underlying stocks via
weighted cross-sectional regression, handles linear constraints on the alpha
portfolios two independent ways, builds position-based factor risk models for
alpha portfolios, and demonstrates that Sharpe-ratio optimization under such
a model collapses onto the same regression once alphas vastly outnumber
stocks.
"""

from .alpha_risk import (
    AlphaFactorModel,
    AlphaWeights,
    LargeNGapReport,
    build_alpha_model,
    combo_stock_weights,
    expansion_alpha_weights,
    large_n_gap,
    regression_residual_alpha_weights,
    sharpe_optimal_alpha_weights,
)
from .constraints import (
    Elimination,
    decode_via_elimination,
    discover_constraints,
    eliminate,
)
from .decoder import (
    DecodeInfo,
    WeightedGram,
    decode,
    decode_with_explicit_weights,
    weighted_gram,
)
from .errors import (
    AlphaDecodeError,
    AsymmetricMatrix,
    BadMultiplier,
    BadWeight,
    ConstraintViolated,
    DegenerateConstraintSplit,
    DegenerateDate,
    EmptyAlphaSlice,
    EmptySpectrum,
    IncompletePanel,
    NormalizationError,
    NotPositiveDefinite,
    NullGram,
    ParseError,
    ProjectionFailed,
    TooFewDates,
    TooShort,
    Underdetermined,
    UntradedStock,
    ValidationError,
    ZeroSignal,
    ZeroSpectrum,
)
from .estimator import StockReturnDecoder
from .linalg import (
    EigenSystem,
    WlsSolution,
    cholesky,
    eigen_low_rank,
    sym_eigen,
    wls_no_intercept,
)
from .panels import (
    AlphaReturnPanel,
    ConstraintMatrix,
    ConstraintReport,
    DecodedReturns,
    PositionTensor,
    StockRiskModel,
    load_constraint_matrix,
    load_decoded_returns,
    load_position_tensor,
    load_return_panel,
    load_risk_model,
    save_constraint_matrix,
    save_decoded_returns,
    save_position_tensor,
    save_return_panel,
    save_risk_model,
    validate_constraints,
)
from .portfolio import (
    StockWeights,
    build_phi_diagonal,
    build_phi_one_factor,
    stock_weights,
)
from .residuals import (
    RegressionWeights,
    ResidualPanel,
    SpecificVariance,
    build_residual_panel,
    erank,
    moving_variance,
    regression_weights,
    specific_variance,
)
from .synth import (
    SynthConfig,
    SynthData,
    gen_alpha_returns,
    gen_dataset,
    gen_expected_returns,
    gen_market,
    gen_positions,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaDecodeError",
    "AlphaFactorModel",
    "AlphaReturnPanel",
    "AlphaWeights",
    "AsymmetricMatrix",
    "BadMultiplier",
    "BadWeight",
    "ConstraintMatrix",
    "ConstraintReport",
    "ConstraintViolated",
    "DecodeInfo",
    "DecodedReturns",
    "DegenerateConstraintSplit",
    "DegenerateDate",
    "EigenSystem",
    "Elimination",
    "EmptyAlphaSlice",
    "EmptySpectrum",
    "IncompletePanel",
    "LargeNGapReport",
    "NormalizationError",
    "NotPositiveDefinite",
    "NullGram",
    "ParseError",
    "PositionTensor",
    "ProjectionFailed",
    "RegressionWeights",
    "ResidualPanel",
    "SpecificVariance",
    "StockReturnDecoder",
    "StockRiskModel",
    "StockWeights",
    "SynthConfig",
    "SynthData",
    "TooFewDates",
    "TooShort",
    "Underdetermined",
    "UntradedStock",
    "ValidationError",
    "WeightedGram",
    "WlsSolution",
    "ZeroSignal",
    "ZeroSpectrum",
    "build_alpha_model",
    "build_phi_diagonal",
    "build_phi_one_factor",
    "build_residual_panel",
    "cholesky",
    "combo_stock_weights",
    "decode",
    "decode_via_elimination",
    "decode_with_explicit_weights",
    "discover_constraints",
    "eigen_low_rank",
    "eliminate",
    "erank",
    "expansion_alpha_weights",
    "gen_alpha_returns",
    "gen_dataset",
    "gen_expected_returns",
    "gen_market",
    "gen_positions",
    "large_n_gap",
    "load_constraint_matrix",
    "load_decoded_returns",
    "load_position_tensor",
    "load_return_panel",
    "load_risk_model",
    "moving_variance",
    "regression_residual_alpha_weights",
    "regression_weights",
    "save_constraint_matrix",
    "save_decoded_returns",
    "save_position_tensor",
    "save_return_panel",
    "save_risk_model",
    "sharpe_optimal_alpha_weights",
    "specific_variance",
    "stock_weights",
    "sym_eigen",
    "validate_constraints",
    "weighted_gram",
    "wls_no_intercept",
]
