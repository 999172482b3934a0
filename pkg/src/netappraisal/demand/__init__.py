"""Trip generation, distribution, mode choice and vehicle conversion."""

from .choice import (
    CONSTANT,
    DEVIATION_PARAMS,
    SKIM_VARIABLES,
    UTILITY_TABLES,
    ChoiceModel,
    DeviationParams,
    Nest,
    default_model,
    demand_deviation,
    logistic_diversion,
    mode_shares,
    mode_utility,
    nest_logsum,
)
from .distribution import DEFAULT_MU, gravity_distribute
from .io import read_skims, read_zones, write_matrix_csv
from .skimset import PAIR_VARIABLES, ZONE_VARIABLES, SkimSet, fill_intrazonal
from .tripends import (
    ATTRACTION_MODELS,
    COVARIATES,
    PRODUCTION_MODELS,
    PURPOSES,
    ZONE_FIELDS,
    TripEnds,
    ZoneAttributes,
    balance_attractions,
    evaluate_regression,
    trip_attraction,
    trip_ends,
    trip_production,
)
from .vehicles import DEFAULT_OCCUPANCY, PCE_FACTORS, VehicleConversion, pce_matrix, vehicles_from_persons

__all__ = [
    "ATTRACTION_MODELS",
    "CONSTANT",
    "COVARIATES",
    "ChoiceModel",
    "DEFAULT_MU",
    "DEFAULT_OCCUPANCY",
    "DEVIATION_PARAMS",
    "DeviationParams",
    "Nest",
    "PAIR_VARIABLES",
    "PCE_FACTORS",
    "PRODUCTION_MODELS",
    "PURPOSES",
    "SKIM_VARIABLES",
    "SkimSet",
    "TripEnds",
    "UTILITY_TABLES",
    "VehicleConversion",
    "ZONE_FIELDS",
    "ZONE_VARIABLES",
    "ZoneAttributes",
    "balance_attractions",
    "default_model",
    "demand_deviation",
    "evaluate_regression",
    "fill_intrazonal",
    "gravity_distribute",
    "logistic_diversion",
    "mode_shares",
    "mode_utility",
    "nest_logsum",
    "pce_matrix",
    "read_skims",
    "read_zones",
    "trip_attraction",
    "trip_ends",
    "trip_production",
    "vehicles_from_persons",
    "write_matrix_csv",
]
