"""Numeraire-free arbitrage theory on finite scenario trees.

The package decides market fairness (existence of a strictly positive
martingale deflator), computes superhedging price intervals with their
strategies and consumption, classifies claim attainability, and solves
expected-utility maximization through its dual over the deflator set --
all exactly, up to documented numerical tolerances, with brute-force
oracles available to re-certify any result.
"""

from .errors import (
    DeflatorError,
    FairtreeError,
    MarketFileError,
    ModelError,
    SizeGuardError,
    SolverError,
    SupermartingaleError,
    UnfairMarketError,
)
from .market import (
    Claim,
    MarketModel,
    ScenarioTree,
    Strategy,
    build_market,
    check_deflator_values,
    complete_strategy,
    deflate,
    fair_price_process,
    self_financing_violations,
    wealth_process,
)
from .deflators import (
    ArbitrageCertificate,
    CompletenessReport,
    Deflator,
    DeflatorPolytope,
    FairnessReport,
    MeasureWeights,
    build_polytope,
    check_complete,
    check_fair,
    deflator_to_measure,
    polytope_minimizer,
    fairness_report,
    measure_to_deflator,
    require_fair,
    sample_deflators,
)
from .hedging import (
    AttainabilityVerdict,
    DecompositionResult,
    PriceInterval,
    check_supermartingale,
    classify_attainability,
    completeness_via_claims,
    local_vertices,
    optional_decomposition,
    superhedge_price,
    superhedge_process,
)
from .utility import (
    DavisPrice,
    DualSolution,
    MinimaxReport,
    PrimalSolution,
    UtilitySpec,
    augment_market,
    davis_price,
    dual_value,
    growth_optimal,
    log_utility,
    parse_utility,
    power_utility,
    solve_dual,
    solve_primal,
    value_functions,
    verify_minimax,
)
from .generate import default_claims, generate_market
from .marketio import (
    ParsedMarket,
    markets_identical,
    parse_market,
    parse_market_text,
    serialize_market,
)

__version__ = "0.1.0"

__all__ = [
    "ArbitrageCertificate",
    "AttainabilityVerdict",
    "Claim",
    "CompletenessReport",
    "DavisPrice",
    "DecompositionResult",
    "Deflator",
    "DeflatorError",
    "DeflatorPolytope",
    "DualSolution",
    "FairnessReport",
    "FairtreeError",
    "MarketFileError",
    "MarketModel",
    "MeasureWeights",
    "MinimaxReport",
    "ModelError",
    "ParsedMarket",
    "PriceInterval",
    "PrimalSolution",
    "ScenarioTree",
    "SizeGuardError",
    "SolverError",
    "Strategy",
    "SupermartingaleError",
    "UnfairMarketError",
    "UtilitySpec",
    "augment_market",
    "build_market",
    "build_polytope",
    "check_complete",
    "check_deflator_values",
    "check_fair",
    "check_supermartingale",
    "classify_attainability",
    "complete_strategy",
    "completeness_via_claims",
    "davis_price",
    "default_claims",
    "deflate",
    "deflator_to_measure",
    "dual_value",
    "fair_price_process",
    "fairness_report",
    "generate_market",
    "growth_optimal",
    "local_vertices",
    "log_utility",
    "markets_identical",
    "measure_to_deflator",
    "optional_decomposition",
    "parse_market",
    "parse_market_text",
    "parse_utility",
    "polytope_minimizer",
    "power_utility",
    "require_fair",
    "sample_deflators",
    "self_financing_violations",
    "serialize_market",
    "solve_dual",
    "solve_primal",
    "superhedge_price",
    "superhedge_process",
    "value_functions",
    "verify_minimax",
    "wealth_process",
]
