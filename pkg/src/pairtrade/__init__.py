"""Threshold-based pairs trading on a mean-reverting spread.

The package covers the full pipeline: spread models over a pair of positive
prices, rolling-window estimation of the return bound and reversion rate,
threshold sizing from worst-case curvature, a staggered sliding-window
backtest engine, a bounded-innovation synthetic generator, and Monte Carlo
harnesses that verify the expected-growth and approximation-error claims.
"""

from .backtest import (
    BacktestConfig,
    BacktestReport,
    LedgerRow,
    buy_and_hold,
    max_drawdown,
    run_backtest,
    write_ledger_csv,
    write_plot_csv,
    write_report_json,
)
from .domain import (
    AccountState,
    BoxBounds,
    DomainError,
    LengthError,
    PricePoint,
    PriceSeries,
    ReturnPair,
    compute_returns,
    return_arrays,
)
from .estimation import (
    DEFAULT_GAMMA_FLOOR,
    WindowConfig,
    WindowEstimates,
    estimate_eta,
    estimate_gamma,
    sign,
)
from .ingest import (
    AdjustmentRule,
    FormatError,
    OrderingError,
    RowError,
    apply_adjustments,
    load_csv,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .spread import (
    CointegrationSpread,
    DegenerateRegressorError,
    SpreadModel,
    StationaryPointError,
    fit_cointegration,
    spread_gradient,
    spread_hessian,
    spread_value,
)
from .synthetic import (
    LemmaSummary,
    OUPairSpec,
    TheoremSummary,
    generate_pair,
    trial_generators,
    verify_lemma,
    verify_theorem,
)
from .trading import (
    TradeDecision,
    allocate,
    step_account,
    threshold_approx,
    threshold_exact,
)

__version__ = "0.1.0"

__all__ = [
    "AccountState",
    "AdjustmentRule",
    "BacktestConfig",
    "BacktestReport",
    "BoxBounds",
    "CointegrationSpread",
    "DEFAULT_GAMMA_FLOOR",
    "DegenerateRegressorError",
    "DomainError",
    "FormatError",
    "KERNEL_BACKEND",
    "LedgerRow",
    "LemmaSummary",
    "LengthError",
    "OrderingError",
    "OUPairSpec",
    "PricePoint",
    "PriceSeries",
    "ReturnPair",
    "RowError",
    "SpreadModel",
    "StationaryPointError",
    "TheoremSummary",
    "TradeDecision",
    "WindowConfig",
    "WindowEstimates",
    "allocate",
    "apply_adjustments",
    "buy_and_hold",
    "compute_returns",
    "estimate_eta",
    "estimate_gamma",
    "fit_cointegration",
    "generate_pair",
    "load_csv",
    "max_drawdown",
    "return_arrays",
    "run_backtest",
    "sign",
    "spread_gradient",
    "spread_hessian",
    "spread_value",
    "step_account",
    "threshold_approx",
    "threshold_exact",
    "trial_generators",
    "verify_lemma",
    "verify_theorem",
    "write_ledger_csv",
    "write_plot_csv",
    "write_report_json",
    "__version__",
]
