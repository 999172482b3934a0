"""Run configuration loaded from a TOML file.

Relative paths are resolved against the directory holding the config file.
Every model coefficient has a built-in default; a config section only needs
the values it overrides. See ``demo/city9/config.toml`` for a complete file.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from types import MappingProxyType
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..appraise import DEFAULT_EMISSION_FACTORS, EmissionFactors, FuelModel, UnitValues, pollutant_prices
from ..assign import AssignmentOptions
from ..demand import (
    ATTRACTION_MODELS,
    DEFAULT_MU,
    DEFAULT_OCCUPANCY,
    DEVIATION_PARAMS,
    PCE_FACTORS,
    PRODUCTION_MODELS,
    PURPOSES,
    ChoiceModel,
    DeviationParams,
    Nest,
    VehicleConversion,
    default_model,
)
from ..errors import InputError, ParseError


@dataclass(frozen=True)
class Period:
    """A modelled hour standing for ``hours_per_year`` similar hours.

    ``hourly_fraction`` is the share of daily trips travelling in that hour.
    """

    name: str
    hourly_fraction: float
    hours_per_year: float

    def __post_init__(self):
        if not (0 < self.hourly_fraction <= 1):
            raise InputError(f"period {self.name!r}: hourly_fraction must be in (0, 1]")
        if not (math.isfinite(self.hours_per_year) and self.hours_per_year > 0):
            raise InputError(f"period {self.name!r}: hours_per_year must be > 0")


DEFAULT_PERIODS = (
    Period("am", 0.09, 730.0),
    Period("pm", 0.09, 730.0),
    Period("offpeak", 0.032, 7300.0),
)


@dataclass(frozen=True)
class Paths:
    network: Path
    zones: Path
    skims: Path
    ownership: Path
    scenarios: tuple[Path, ...] = ()
    freight: Path | None = None
    output: Path = Path("out")


@dataclass(frozen=True)
class DemandSettings:
    purposes: tuple[str, ...] = PURPOSES
    production: Mapping[str, Mapping[str, float]] = PRODUCTION_MODELS
    attraction: Mapping[str, Mapping[str, float]] = ATTRACTION_MODELS
    choice: Mapping[str, ChoiceModel] = field(default_factory=lambda: {p: default_model(p) for p in PURPOSES})
    mu: float = DEFAULT_MU
    ipf_tolerance: float = 1e-10  # relative to total trips
    ipf_max_iterations: int = 10_000
    intrazonal_share: float = 0.5
    conversion: VehicleConversion = field(default_factory=VehicleConversion)
    deviation_enabled: bool = False
    deviation_delta_cost: float = 0.0
    deviation_params: Mapping[str, DeviationParams] = DEVIATION_PARAMS
    feedback_iterations: int = 0
    transit_time_growth: float = 1.0

    def __post_init__(self):
        for p in self.purposes:
            if p not in PURPOSES:
                raise InputError(f"unknown trip purpose {p!r}")
            for kind, models in (("production", self.production), ("attraction", self.attraction)):
                if p not in models:
                    raise InputError(f"no {kind} model for purpose {p!r}")
            if p not in self.choice:
                raise InputError(f"no choice model for purpose {p!r}")
        if not self.mu > 0:
            raise InputError(f"mu must be > 0, got {self.mu}")
        if not self.ipf_tolerance > 0:
            raise InputError("ipf_tolerance must be > 0")
        if not 0 < self.intrazonal_share <= 1:
            raise InputError("intrazonal_share must be in (0, 1]")
        if not 0 <= self.feedback_iterations <= 5:
            raise InputError("feedback_iterations must be between 0 and 5")
        if not self.transit_time_growth > 0:
            raise InputError("transit_time_growth must be > 0")


@dataclass(frozen=True)
class RunConfig:
    paths: Paths
    growth: Mapping[str, float] = field(default_factory=lambda: {"P": 1.02, "VP": 1.03})
    periods: tuple[Period, ...] = DEFAULT_PERIODS
    units: UnitValues = field(default_factory=UnitValues)
    fuel: FuelModel = field(default_factory=FuelModel)
    emissions: EmissionFactors = DEFAULT_EMISSION_FACTORS
    demand: DemandSettings = field(default_factory=DemandSettings)
    assignment: AssignmentOptions = field(default_factory=AssignmentOptions)
    selected_scenarios: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.periods:
            raise InputError("at least one period is required")
        names = [p.name for p in self.periods]
        if len(set(names)) != len(names):
            raise InputError(f"duplicate period names: {names}")
        for attr, g in self.growth.items():
            if not (math.isfinite(g) and g > 0):
                raise InputError(f"growth multiplier for {attr} must be > 0, got {g}")

    @property
    def horizon(self) -> int:
        return self.units.horizon

    @property
    def discount_rate(self) -> float:
        return self.units.discount_rate

    def with_overrides(
        self,
        years: int | None = None,
        rate: float | None = None,
        gap: float | None = None,
        max_iterations: int | None = None,
        output: Path | None = None,
        scenarios: tuple[str, ...] | None = None,
    ) -> "RunConfig":
        units = self.units
        if years is not None:
            units = units.with_changes(horizon=years)
        if rate is not None:
            units = units.with_changes(discount_rate=rate)
        opts = self.assignment
        if gap is not None:
            opts = replace(opts, relative_gap_target=gap)
        if max_iterations is not None:
            opts = replace(opts, max_iterations=max_iterations)
        paths = self.paths if output is None else replace(self.paths, output=Path(output))
        return replace(
            self,
            units=units,
            assignment=opts,
            paths=paths,
            selected_scenarios=self.selected_scenarios if scenarios is None else tuple(scenarios),
        )


# --- TOML decoding ---


def _section(data: Mapping[str, Any], key: str, where: str) -> Mapping[str, Any]:
    value = data.get(key, {})
    if not isinstance(value, dict):
        raise InputError(f"{where}: [{key}] must be a table")
    return value


def _reject_unknown(table: Mapping[str, Any], allowed, where: str) -> None:
    extra = sorted(set(table) - set(allowed))
    if extra:
        raise InputError(f"{where}: unknown key(s) {extra}")


def _float_map(table: Mapping[str, Any], where: str) -> dict[str, float]:
    out = {}
    for k, v in table.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise InputError(f"{where}.{k}: expected a number, got {v!r}")
        out[k] = float(v)
    return out


def _merge_models(defaults: Mapping[str, Mapping[str, float]], table: Mapping[str, Any], where: str):
    """Purpose tables replace the built-in regression for that purpose wholesale."""
    merged = {p: dict(m) for p, m in defaults.items()}
    for purpose, terms in table.items():
        if not isinstance(terms, dict):
            raise InputError(f"{where}.{purpose}: expected a table of term = coefficient")
        merged[purpose] = _float_map(terms, f"{where}.{purpose}")
    return MappingProxyType(merged)


def _choice_models(table: Mapping[str, Any], where: str) -> dict[str, ChoiceModel]:
    theta = _float_map(_section(table, "theta", where), f"{where}.theta")
    utilities = _section(table, "utility", where)
    _reject_unknown(table, ("theta", "utility"), where)
    models = {}
    for purpose in PURPOSES:
        base = default_model(purpose)
        util = {m: dict(c) for m, c in base.utilities.items()}
        for mode, coefs in utilities.get(purpose, {}).items():
            util[mode] = _float_map(coefs, f"{where}.utility.{purpose}.{mode}")
        nests = {n: Nest(nest.members, theta.get(purpose, nest.theta)) for n, nest in base.nests.items()}
        models[purpose] = ChoiceModel(purpose, util, nests)
    unknown = sorted(set(utilities) - set(PURPOSES)) + sorted(set(theta) - set(PURPOSES))
    if unknown:
        raise InputError(f"{where}: unknown purpose(s) {unknown}")
    return models


def _demand(table: Mapping[str, Any], where: str) -> DemandSettings:
    allowed = {
        "purposes",
        "mu",
        "ipf_tolerance",
        "ipf_max_iterations",
        "intrazonal_share",
        "feedback_iterations",
        "transit_time_growth",
        "occupancy",
        "pce",
        "deviation",
        "production",
        "attraction",
        "choice",
    }
    _reject_unknown(table, allowed, where)
    kw: dict[str, Any] = {}
    for key in ("mu", "ipf_tolerance", "intrazonal_share", "transit_time_growth"):
        if key in table:
            kw[key] = float(table[key])
    for key in ("ipf_max_iterations", "feedback_iterations"):
        if key in table:
            kw[key] = int(table[key])
    if "purposes" in table:
        kw["purposes"] = tuple(table["purposes"])
    occupancy = dict(DEFAULT_OCCUPANCY) | _float_map(_section(table, "occupancy", where), f"{where}.occupancy")
    pce = dict(PCE_FACTORS) | _float_map(_section(table, "pce", where), f"{where}.pce")
    kw["conversion"] = VehicleConversion(occupancy, pce)
    dev = _section(table, "deviation", where)
    _reject_unknown(dev, {"enabled", "delta_cost", "params"}, f"{where}.deviation")
    kw["deviation_enabled"] = bool(dev.get("enabled", False))
    kw["deviation_delta_cost"] = float(dev.get("delta_cost", 0.0))
    params = dict(DEVIATION_PARAMS)
    for mode, ab in _section(dev, "params", f"{where}.deviation").items():
        vals = _float_map(ab, f"{where}.deviation.params.{mode}")
        params[mode] = DeviationParams(vals["a"], vals["b"])
    kw["deviation_params"] = MappingProxyType(params)
    kw["production"] = _merge_models(PRODUCTION_MODELS, _section(table, "production", where), f"{where}.production")
    kw["attraction"] = _merge_models(ATTRACTION_MODELS, _section(table, "attraction", where), f"{where}.attraction")
    kw["choice"] = _choice_models(_section(table, "choice", where), f"{where}.choice")
    return DemandSettings(**kw)


def _units(table: Mapping[str, Any], horizon: Mapping[str, Any], where: str) -> UnitValues:
    allowed = {
        "value_of_time",
        "fuel_price",
        "annual_accident_cost_base",
        "pollutant_reading",
        "pollutant_prices",
        "severity_shares",
    }
    _reject_unknown(table, allowed, where)
    prices = pollutant_prices(table.get("pollutant_reading", "scaled"))
    prices.update(_float_map(_section(table, "pollutant_prices", where), f"{where}.pollutant_prices"))
    kw: dict[str, Any] = {"pollutant_price": prices}
    for key in ("value_of_time", "fuel_price", "annual_accident_cost_base"):
        if key in table:
            kw[key] = float(table[key])
    if "severity_shares" in table:
        kw["severity_shares"] = _float_map(table["severity_shares"], f"{where}.severity_shares")
    _reject_unknown(horizon, {"years", "discount_rate", "currency"}, "horizon")
    if "years" in horizon:
        kw["horizon"] = int(horizon["years"])
    if "discount_rate" in horizon:
        kw["discount_rate"] = float(horizon["discount_rate"])
    if "currency" in horizon:
        kw["currency"] = str(horizon["currency"])
    return UnitValues(**kw)


def _emissions(table: Mapping[str, Any]) -> EmissionFactors:
    if not table:
        return DEFAULT_EMISSION_FACTORS
    if "edges" not in table:
        raise InputError("[emissions] needs an 'edges' list")
    factors = {k: tuple(float(x) for x in v) for k, v in table.items() if k != "edges"}
    return EmissionFactors(tuple(float(x) for x in table["edges"]), factors)


def config_from_dict(data: Mapping[str, Any], base_dir: Path = Path(".")) -> RunConfig:
    _reject_unknown(
        data,
        {"paths", "horizon", "growth", "periods", "units", "fuel", "emissions", "demand", "assignment", "scenarios"},
        "config",
    )
    p = _section(data, "paths", "config")
    _reject_unknown(p, {f.name for f in fields(Paths)}, "paths")
    for key in ("network", "zones", "skims", "ownership"):
        if key not in p:
            raise InputError(f"[paths] is missing {key!r}")

    def resolve(v) -> Path:
        path = Path(v)
        return path if path.is_absolute() else base_dir / path

    paths = Paths(
        network=resolve(p["network"]),
        zones=resolve(p["zones"]),
        skims=resolve(p["skims"]),
        ownership=resolve(p["ownership"]),
        scenarios=tuple(resolve(s) for s in p.get("scenarios", [])),
        freight=resolve(p["freight"]) if "freight" in p else None,
        output=resolve(p.get("output", "out")),
    )
    growth = {"P": 1.02, "VP": 1.03} | _float_map(_section(data, "growth", "config"), "growth")
    periods = DEFAULT_PERIODS
    if "periods" in data:
        periods = tuple(
            Period(str(row["name"]), float(row["hourly_fraction"]), float(row["hours_per_year"]))
            for row in data["periods"]
        )
    fuel = FuelModel(**_float_map(_section(data, "fuel", "config"), "fuel"))
    a = _section(data, "assignment", "config")
    _reject_unknown(a, {"max_iterations", "relative_gap", "line_search"}, "assignment")
    opts = AssignmentOptions(
        max_iterations=int(a.get("max_iterations", 500)),
        relative_gap_target=float(a.get("relative_gap", 1e-4)),
        line_search=a.get("line_search", "exact-bisection"),
    )
    return RunConfig(
        paths=paths,
        growth=growth,
        periods=periods,
        units=_units(_section(data, "units", "config"), _section(data, "horizon", "config"), "units"),
        fuel=fuel,
        emissions=_emissions(_section(data, "emissions", "config")),
        demand=_demand(_section(data, "demand", "config"), "demand"),
        assignment=opts,
        selected_scenarios=tuple(data.get("scenarios", ())),
    )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", 0) or 0
        col = getattr(exc, "colno", 0) or 0
        raise ParseError(str(exc).split(" (at line")[0], path, line, col) from None
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        return config_from_dict(data, path.parent)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise InputError(f"{path}: {exc}") from None
        raise InputError(f"{path}: invalid value ({exc})") from None
