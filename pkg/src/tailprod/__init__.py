"""Product-tail asymptotics under conditional dependence, with ruin estimators."""

from .dependence import (
    AmhModel,
    CdModel,
    FrankModel,
    SarmanovModel,
    ShiftModel,
    ValidationReport,
    independent_pair,
    shift_construct,
)
from .engine import BlockResult, RngStream, proportion_ci, run_blocks
from .estimators import (
    CdDiagnostic,
    TailRatioReport,
    breiman_constant,
    breiman_constant_mc,
    cd_diagnostic,
    mean_tail_adjustment,
    moment_condition_report,
    product_tail_exact,
    tail_ratio_mc,
)
from .kernels import (
    ExpKernel,
    FgmKernel,
    PowerKernel,
    ReciprocalKernel,
    ScaledFgmKernel,
    TruncatedExpKernel,
)
from .marginals import (
    Degenerate,
    Exponential,
    LogPareto,
    Marginal,
    Pareto,
    ShiftedPareto,
    Uniform,
)
from .ruin import (
    RiskModel,
    RuinResult,
    asymptotic_psi_inf,
    asymptotic_psi_n,
    psi_finite_mc,
    psi_infinite_mc,
    term_tail_mc,
)

__version__ = "0.1.0"

__all__ = [
    "AmhModel", "BlockResult", "CdDiagnostic", "CdModel", "Degenerate",
    "ExpKernel", "Exponential", "FgmKernel", "FrankModel", "LogPareto",
    "Marginal", "Pareto", "PowerKernel", "ReciprocalKernel", "RiskModel",
    "RngStream", "RuinResult", "SarmanovModel", "ScaledFgmKernel",
    "ShiftModel", "ShiftedPareto", "TailRatioReport", "TruncatedExpKernel",
    "Uniform", "ValidationReport", "asymptotic_psi_inf", "asymptotic_psi_n",
    "breiman_constant", "breiman_constant_mc", "cd_diagnostic",
    "independent_pair", "mean_tail_adjustment", "moment_condition_report",
    "product_tail_exact", "proportion_ci", "psi_finite_mc", "psi_infinite_mc",
    "run_blocks", "shift_construct", "tail_ratio_mc", "term_tail_mc",
]
