"""Unit prices and appraisal horizon."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Literal, Mapping

from ..errors import InputError

# currency per tonne; the printed table is ambiguous for SO2 and NMVOC
POLLUTANT_PRICES_SCALED: Mapping[str, float] = MappingProxyType({"NOx": 600.0, "SO2": 1825.0, "CO": 188.0, "NMVOC": 500.0})
POLLUTANT_PRICES_RAW: Mapping[str, float] = MappingProxyType({"NOx": 600.0, "SO2": 1.825, "CO": 188.0, "NMVOC": 0.5})
POLLUTANT_ALIASES: Mapping[str, str] = MappingProxyType({"HC": "NMVOC"})

SEVERITY_SHARES: Mapping[str, float] = MappingProxyType({"fatal": 0.04, "injury": 0.24, "pdo": 0.72})

PollutantReading = Literal["scaled", "raw"]


def pollutant_prices(reading: PollutantReading = "scaled") -> dict[str, float]:
    if reading == "scaled":
        return dict(POLLUTANT_PRICES_SCALED)
    if reading == "raw":
        return dict(POLLUTANT_PRICES_RAW)
    raise InputError(f"pollutant price reading must be 'scaled' or 'raw', got {reading!r}")


@dataclass(frozen=True)
class UnitValues:
    """Prices used to monetise physical deltas.

    value_of_time is per vehicle-hour, fuel_price per liter, pollutant
    prices per tonne and the accident base per year, all in ``currency``.
    """

    value_of_time: float = 2.004
    fuel_price: float = 0.7
    pollutant_price: Mapping[str, float] = field(default_factory=lambda: dict(POLLUTANT_PRICES_SCALED))
    annual_accident_cost_base: float = 110e6
    severity_shares: Mapping[str, float] = field(default_factory=lambda: dict(SEVERITY_SHARES))
    discount_rate: float = 0.08
    horizon: int = 15
    currency: str = "USD"

    def __post_init__(self):
        prices = {"value_of_time": self.value_of_time, "fuel_price": self.fuel_price}
        prices["annual_accident_cost_base"] = self.annual_accident_cost_base
        prices.update({f"pollutant_price[{k}]": v for k, v in self.pollutant_price.items()})
        for name, v in prices.items():
            if not (math.isfinite(v) and v >= 0):
                raise InputError(f"{name} must be finite and >= 0, got {v}")
        if any(s < 0 for s in self.severity_shares.values()) or not math.isclose(
            math.fsum(self.severity_shares.values()), 1.0, abs_tol=1e-9
        ):
            raise InputError(f"severity shares must be non-negative and sum to 1, got {dict(self.severity_shares)}")
        if not 0 <= self.discount_rate < 1:
            raise InputError(f"discount rate must be in [0, 1), got {self.discount_rate}")
        if isinstance(self.horizon, bool) or not isinstance(self.horizon, int) or self.horizon < 1:
            raise InputError(f"horizon must be an integer >= 1, got {self.horizon!r}")

    def price_per_tonne(self, pollutant: str) -> float:
        key = POLLUTANT_ALIASES.get(pollutant, pollutant)
        try:
            return self.pollutant_price[key]
        except KeyError:
            raise InputError(f"no price for pollutant {pollutant!r}") from None

    def with_changes(self, **kw) -> "UnitValues":
        return replace(self, **kw)
