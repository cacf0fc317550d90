"""Monte Carlo environmental contours and risk-based structural design.

Estimates classical and buffered environmental contours from samples of
environmental variables, evaluates value-at-risk and conditional
value-at-risk of total design cost, and optimizes linear strength
designs against contour thresholds.
"""

from .contour import (
    ContourBoundary,
    ContourTable,
    DirectionGrid,
    ExceedanceReport,
    boundary,
    build_table,
    directional_quantile,
    directional_tail_mean,
    validate_exceedance,
)
from .design import (
    CostModel,
    RiskOfCostReport,
    choose_u_signs,
    compare_concepts,
    cvar_of_total_cost,
    domination_condition,
    failure_probability,
    halfspace_condition,
    risk_of_cost_report,
    sufficient_cvar_condition,
    var_of_total_cost,
)
from .envdata import EnvModelConfig, Marginal, read_samples, sample, write_samples
from .lindesign import (
    LinearDesignProblem,
    LinearProgram,
    LpOutcome,
    condition_check,
    lp_solve,
    optimize_design,
)
from .risk import (
    EmpiricalDistribution,
    RiskLevel,
    buffered_failure_probability,
    buffered_failure_probability_scan,
    conditional_value_at_risk,
    superquantile_above,
    value_at_risk,
)

__version__ = "0.1.0"

__all__ = [
    "ContourBoundary",
    "ContourTable",
    "CostModel",
    "DirectionGrid",
    "EmpiricalDistribution",
    "EnvModelConfig",
    "ExceedanceReport",
    "LinearDesignProblem",
    "LinearProgram",
    "LpOutcome",
    "Marginal",
    "RiskLevel",
    "RiskOfCostReport",
    "boundary",
    "buffered_failure_probability",
    "buffered_failure_probability_scan",
    "build_table",
    "choose_u_signs",
    "compare_concepts",
    "condition_check",
    "conditional_value_at_risk",
    "cvar_of_total_cost",
    "directional_quantile",
    "directional_tail_mean",
    "domination_condition",
    "failure_probability",
    "halfspace_condition",
    "lp_solve",
    "optimize_design",
    "read_samples",
    "risk_of_cost_report",
    "sample",
    "superquantile_above",
    "validate_exceedance",
    "value_at_risk",
    "var_of_total_cost",
    "write_samples",
]
