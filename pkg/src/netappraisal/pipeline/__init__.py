"""Configuration, horizon orchestration and report emission."""

from .config import DEFAULT_PERIODS, DemandSettings, Paths, Period, RunConfig, config_from_dict, load_config
from .report import emit_reports, report_files
from .run import (
    STATUS_QUO,
    HorizonResult,
    Inputs,
    ScenarioRun,
    VehicleDemand,
    YearRun,
    assign_periods,
    build_demand,
    distribute,
    grown_zones,
    load_inputs,
    read_freight,
    run_horizon,
    run_year,
    simulate_year,
    split_modes,
    to_vehicles,
    year_metrics,
)

__all__ = [
    "DEFAULT_PERIODS",
    "DemandSettings",
    "HorizonResult",
    "Inputs",
    "Paths",
    "Period",
    "RunConfig",
    "STATUS_QUO",
    "ScenarioRun",
    "VehicleDemand",
    "YearRun",
    "assign_periods",
    "build_demand",
    "config_from_dict",
    "distribute",
    "emit_reports",
    "grown_zones",
    "load_config",
    "load_inputs",
    "read_freight",
    "report_files",
    "run_horizon",
    "run_year",
    "simulate_year",
    "split_modes",
    "to_vehicles",
    "year_metrics",
]
