"""Fuel, emission and accident quantities derived from loaded links."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal
from types import MappingProxyType
from typing import Mapping

import numpy as np

from ..errors import InputError
from .units import UnitValues

POLLUTANTS = ("CO", "HC", "NOx", "SO2")


@dataclass(frozen=True)
class FuelModel:
    """Liters per vehicle-km as k1 + k2 / v + k3 * v**2 for speed v in km/h.

    The defaults are illustrative and should be replaced by calibrated values.
    """

    k1: float = 0.05
    k2: float = 1.2
    k3: float = 1e-5

    def __post_init__(self):
        v = np.linspace(5.0, 120.0, 1151)
        if not np.all(self.per_km(v) > 0):
            raise InputError(f"fuel model {self} is not positive over 5-120 km/h")

    def per_km(self, speed):
        speed = np.asarray(speed, dtype=float)
        return self.k1 + self.k2 / speed + self.k3 * speed**2


def _link_arrays(flow, speed, length):
    flow = np.asarray(flow, dtype=float)
    speed = np.asarray(speed, dtype=float)
    length = np.asarray(length, dtype=float)
    return np.broadcast_arrays(flow, speed, length)


def fuel_liters(flow, speed, length, model: FuelModel = FuelModel(), hours: float = 1.0) -> float:
    """Liters burnt by ``flow`` veh/h over ``hours`` on links of ``length`` km at ``speed`` km/h."""
    flow, speed, length = _link_arrays(flow, speed, length)
    if np.any(speed <= 0):
        raise InputError("link speeds must be > 0 to evaluate fuel use")
    return math.fsum((flow * hours * length * model.per_km(speed)).ravel())


@dataclass(frozen=True)
class EmissionFactors:
    """Grams per vehicle-km by speed bin.

    Bin k covers [edges[k], edges[k+1]); the last bin also includes its
    upper edge.
    """

    edges: tuple[float, ...]
    factors: Mapping[str, tuple[float, ...]]

    def __post_init__(self):
        e = self.edges
        if len(e) < 2 or e[0] > 0 or e[-1] < 120 or any(b <= a for a, b in zip(e, e[1:])):
            raise InputError(f"speed bins must increase and cover 0-120 km/h, got {e}")
        for p, row in self.factors.items():
            if len(row) != len(e) - 1:
                raise InputError(f"{p}: expected {len(e) - 1} factors, got {len(row)}")
            if any(not (math.isfinite(f) and f >= 0) for f in row):
                raise InputError(f"{p}: emission factors must be finite and >= 0")

    def lookup(self, pollutant: str, speed) -> np.ndarray:
        speed = np.asarray(speed, dtype=float)
        lo, hi = self.edges[0], self.edges[-1]
        if np.any((speed < lo) | (speed > hi) | ~np.isfinite(speed)):
            raise InputError(f"speed outside emission bins [{lo}, {hi}] km/h")
        k = np.clip(np.searchsorted(self.edges, speed, side="right") - 1, 0, len(self.edges) - 2)
        return np.asarray(self.factors[pollutant], dtype=float)[k]


# Illustrative urban factors; supply measured values through the run config.
DEFAULT_EMISSION_FACTORS = EmissionFactors(
    edges=(0.0, 20.0, 40.0, 60.0, 80.0, 100.0, 130.0),
    factors=MappingProxyType({
        "CO": (30.0, 18.0, 12.0, 9.0, 8.0, 9.0),
        "HC": (3.0, 1.8, 1.2, 0.9, 0.8, 0.9),
        "NOx": (1.2, 1.0, 0.9, 0.9, 1.0, 1.2),
        "SO2": (0.08, 0.06, 0.05, 0.05, 0.05, 0.06),
    }),
)  # fmt: skip


def emissions_kg(flow, speed, length, factors: EmissionFactors = DEFAULT_EMISSION_FACTORS, hours: float = 1.0):
    """Kilograms emitted per pollutant."""
    flow, speed, length = _link_arrays(flow, speed, length)
    vkm = flow * hours * length
    return {p: math.fsum((vkm * factors.lookup(p, speed)).ravel()) / 1000.0 for p in factors.factors}


def table_delta(scenario: Mapping[str, float], baseline: Mapping[str, float]) -> dict[str, tuple[float, float]]:
    """Per-key (difference, percent change) of two reported quantity tables.

    Differences are taken in decimal arithmetic on the printed values so that
    no binary rounding leaks into the result.
    """
    out = {}
    for key, base in baseline.items():
        if key not in scenario:
            raise InputError(f"{key!r} missing from scenario table")
        diff = Decimal(repr(float(scenario[key]))) - Decimal(repr(float(base)))
        pct = float(diff / Decimal(repr(float(base))) * 100) if base else math.nan
        out[key] = (float(diff), pct)
    return out


@dataclass(frozen=True)
class AccidentCost:
    total: float
    by_severity: Mapping[str, float]


def accident_cost(vkt_ratio_change: float, unit: UnitValues, hotspot_multiplier: float = 1.0) -> AccidentCost:
    """Yearly accident cost change, linear in the relative change of VKT."""
    if not vkt_ratio_change > -1:
        raise InputError(f"VKT ratio change must be > -1, got {vkt_ratio_change}")
    total = unit.annual_accident_cost_base * vkt_ratio_change * hotspot_multiplier
    return AccidentCost(total, {k: total * s for k, s in unit.severity_shares.items()})


@dataclass(frozen=True)
class MetricsDelta:
    """Signed yearly change of network performance, scenario minus baseline.

    ``accident_vkt_change`` is the relative change of accident-weighted VKT.
    """

    vehicle_hours: float = 0.0
    vehicle_km: float = 0.0
    fuel: float = 0.0
    emissions: Mapping[str, float] = field(default_factory=dict)
    accident_vkt_change: float = 0.0

    def scaled(self, factor: float) -> "MetricsDelta":
        return MetricsDelta(
            self.vehicle_hours * factor,
            self.vehicle_km * factor,
            self.fuel * factor,
            {p: v * factor for p, v in self.emissions.items()},
            self.accident_vkt_change * factor,
        )


@dataclass(frozen=True)
class AnnualMetrics:
    """Yearly totals for one network state.

    vehicle_hours in veh-h, vehicle_km in veh-km, fuel in liters, emissions
    in kg. ``accident_vkt`` is VKT weighted by each link's accident-rate
    multiplier. ``converged`` is False if any assignment missed its gap target.
    """

    vehicle_hours: float
    vehicle_km: float
    fuel: float
    emissions: Mapping[str, float]
    accident_vkt: float
    converged: bool = True

    def __post_init__(self):
        values = {"vehicle_hours": self.vehicle_hours, "vehicle_km": self.vehicle_km, "fuel": self.fuel}
        values["accident_vkt"] = self.accident_vkt
        values.update({f"emissions[{p}]": v for p, v in self.emissions.items()})
        for name, v in values.items():
            if not (math.isfinite(v) and v >= 0):
                raise InputError(f"{name} must be finite and >= 0, got {v}")

    def __sub__(self, other: "AnnualMetrics") -> MetricsDelta:
        if set(self.emissions) != set(other.emissions):
            raise InputError("emission pollutant sets differ")
        if other.accident_vkt > 0:
            change = (self.accident_vkt - other.accident_vkt) / other.accident_vkt
        elif self.accident_vkt == 0:
            change = 0.0
        else:
            raise InputError("accident exposure change from a zero baseline is undefined")
        return MetricsDelta(
            self.vehicle_hours - other.vehicle_hours,
            self.vehicle_km - other.vehicle_km,
            self.fuel - other.fuel,
            {p: self.emissions[p] - other.emissions[p] for p in sorted(self.emissions)},
            change,
        )
