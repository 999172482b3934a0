"""Monetisation of network deltas, discounting and scenario comparison."""

from .io import (
    YEAR_COLUMNS,
    dumps_json,
    ledger_from_dict,
    ledger_to_dict,
    read_ledger,
    summary,
    write_ledger,
    year_rows,
    year_table_csv,
)
from .ledger import (
    COMPONENTS,
    AppraisalLedger,
    Comparison,
    LedgerYear,
    ScenarioResult,
    assemble_ledger,
    bc_ratio,
    compare_scenarios,
    cumulative_npv,
    ledger_npv,
    monetize,
    npv,
    payback_year,
    sensitivity,
    summarize,
)
from .physical import (
    DEFAULT_EMISSION_FACTORS,
    POLLUTANTS,
    AccidentCost,
    AnnualMetrics,
    EmissionFactors,
    FuelModel,
    MetricsDelta,
    accident_cost,
    emissions_kg,
    fuel_liters,
    table_delta,
)
from .units import (
    POLLUTANT_ALIASES,
    POLLUTANT_PRICES_RAW,
    POLLUTANT_PRICES_SCALED,
    SEVERITY_SHARES,
    UnitValues,
    pollutant_prices,
)

__all__ = [
    "AccidentCost",
    "AnnualMetrics",
    "AppraisalLedger",
    "COMPONENTS",
    "Comparison",
    "DEFAULT_EMISSION_FACTORS",
    "EmissionFactors",
    "FuelModel",
    "LedgerYear",
    "MetricsDelta",
    "POLLUTANTS",
    "POLLUTANT_ALIASES",
    "POLLUTANT_PRICES_RAW",
    "POLLUTANT_PRICES_SCALED",
    "SEVERITY_SHARES",
    "ScenarioResult",
    "UnitValues",
    "YEAR_COLUMNS",
    "accident_cost",
    "assemble_ledger",
    "bc_ratio",
    "compare_scenarios",
    "cumulative_npv",
    "dumps_json",
    "emissions_kg",
    "fuel_liters",
    "ledger_from_dict",
    "ledger_npv",
    "ledger_to_dict",
    "monetize",
    "npv",
    "payback_year",
    "pollutant_prices",
    "read_ledger",
    "sensitivity",
    "summarize",
    "summary",
    "table_delta",
    "write_ledger",
    "year_rows",
    "year_table_csv",
]
