"""Monetised yearly streams, discounting, payback and scenario ranking.

Ledgers store costs as positive numbers and benefits as negative ones.
Reports flip the sign so that benefits read positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping, Sequence, Union

from ..errors import InputError
from ..netgraph.scenario import DirectCosts
from .physical import MetricsDelta, accident_cost
from .units import UnitValues

COMPONENTS = ("time", "fuel", "emission", "accident")


@dataclass(frozen=True)
class LedgerYear:
    """Cost-positive monetary components of one year."""

    time: float = 0.0
    fuel: float = 0.0
    emission: float = 0.0
    accident: float = 0.0
    maintenance: float = 0.0

    def __post_init__(self):
        for name in (*COMPONENTS, "maintenance"):
            if not math.isfinite(getattr(self, name)):
                raise InputError(f"ledger component {name} must be finite")

    @property
    def total(self) -> float:
        return math.fsum((self.time, self.fuel, self.emission, self.accident, self.maintenance))

    def scaled(self, factors: Mapping[str, float]) -> "LedgerYear":
        return replace(self, **{k: getattr(self, k) * f for k, f in factors.items()})


def monetize(delta: MetricsDelta, unit: UnitValues, hotspot_multiplier: float = 1.0) -> LedgerYear:
    """Price a physical delta; positive deltas become costs."""
    emission = math.fsum(kg * unit.price_per_tonne(p) / 1000.0 for p, kg in sorted(delta.emissions.items()))
    return LedgerYear(
        time=delta.vehicle_hours * unit.value_of_time,
        fuel=delta.fuel * unit.fuel_price,
        emission=emission,
        accident=accident_cost(delta.accident_vkt_change, unit, hotspot_multiplier).total,
    )


YearInput = Union[MetricsDelta, LedgerYear]


@dataclass(frozen=True)
class AppraisalLedger:
    """Capital outlay, construction-period disruption and T operating years.

    ``construction_phase`` holds the disruption costs of the building year
    (year 0). ``years[i]`` is operating year i + 1.
    """

    name: str
    construction_phase: LedgerYear
    years: tuple[LedgerYear, ...]
    construction: float = 0.0
    acquisition: float = 0.0
    currency: str = "USD"

    def __post_init__(self):
        if not (math.isfinite(self.construction) and math.isfinite(self.acquisition)):
            raise InputError(f"{self.name}: capital costs must be finite")
        if len(self.years) < 1:
            raise InputError(f"{self.name}: ledger needs at least one operating year")

    @property
    def horizon(self) -> int:
        return len(self.years)

    @property
    def capital(self) -> float:
        return math.fsum((self.construction, self.acquisition))

    @property
    def initial_cost(self) -> float:
        """Year-0 outlay: capital plus construction-period disruption, summed without intermediate rounding."""
        cp = self.construction_phase
        return math.fsum(
            (self.construction, self.acquisition, cp.time, cp.fuel, cp.emission, cp.accident, cp.maintenance)
        )

    def cash_flows(self) -> list[float]:
        """Net benefit of each operating year (benefit-positive)."""
        return [-y.total for y in self.years]

    def component_total(self, name: str) -> float:
        return math.fsum([getattr(self.construction_phase, name)] + [getattr(y, name) for y in self.years])

    def scaled(self, factors: Mapping[str, float]) -> "AppraisalLedger":
        return replace(
            self,
            construction_phase=self.construction_phase.scaled(factors),
            years=tuple(y.scaled(factors) for y in self.years),
        )


def _as_year(item: YearInput, unit: UnitValues) -> LedgerYear:
    if isinstance(item, LedgerYear):
        return item
    if isinstance(item, MetricsDelta):
        return monetize(item, unit)
    raise InputError(f"expected a metrics delta or a ledger year, got {type(item).__name__}")


def assemble_ledger(
    direct: DirectCosts,
    construction: YearInput,
    operation: Mapping[int, YearInput] | Sequence[YearInput],
    unit: UnitValues,
    name: str = "scenario",
    horizon: int | None = None,
) -> AppraisalLedger:
    """Build a ledger from direct costs and per-year deltas.

    ``operation`` maps year 1..T to a physical delta or an already monetised
    year; a plain sequence is read as years 1, 2, ... The scenario's annual
    maintenance is charged in every operating year.
    """
    horizon = unit.horizon if horizon is None else horizon
    if not isinstance(operation, Mapping):
        operation = dict(enumerate(operation, start=1))
    missing = [y for y in range(1, horizon + 1) if y not in operation]
    if missing:
        raise InputError(f"{name}: no delta for operating year(s) {missing}")
    extra = sorted(set(operation) - set(range(1, horizon + 1)))
    if extra:
        raise InputError(f"{name}: deltas for years {extra} lie outside the {horizon}-year horizon")
    years = tuple(replace(_as_year(operation[y], unit), maintenance=direct.annual_maintenance) for y in range(1, horizon + 1))
    return AppraisalLedger(
        name=name,
        construction_phase=_as_year(construction, unit),
        years=years,
        construction=direct.construction,
        acquisition=direct.acquisition,
        currency=unit.currency,
    )


def _discounted(cash_flows: Sequence[float], r: float) -> list[float]:
    if not 0 <= r < 1:
        raise InputError(f"discount rate must be in [0, 1), got {r}")
    return [c / (1.0 + r) ** i for i, c in enumerate(cash_flows, start=1)]


def npv(c0: float, cash_flows: Sequence[float], r: float) -> float:
    """-C0 + sum of C_i / (1 + r)**i for i = 1..T."""
    return math.fsum([-c0, *_discounted(cash_flows, r)])


def cumulative_npv(c0: float, cash_flows: Sequence[float], r: float) -> list[float]:
    """NPV truncated after year k, for k = 0..T."""
    terms = [-c0, *_discounted(cash_flows, r)]
    return [math.fsum(terms[: k + 1]) for k in range(len(terms))]


def payback_year(c0: float, cash_flows: Sequence[float], r: float) -> int | None:
    """First year whose cumulative NPV is non-negative, or None within the horizon."""
    for k, value in enumerate(cumulative_npv(c0, cash_flows, r)[1:], start=1):
        if value >= 0:
            return k
    return None


def ledger_npv(ledger: AppraisalLedger, r: float) -> float:
    return npv(ledger.initial_cost, ledger.cash_flows(), r)


def bc_ratio(ledger: AppraisalLedger, r: float) -> float | None:
    """Discounted benefits over discounted costs; None if there are no costs."""
    benefits, costs = [], [max(ledger.capital, 0.0)]
    if ledger.capital < 0:
        benefits.append(-ledger.capital)
    for i, year in enumerate((ledger.construction_phase, *ledger.years)):
        factor = (1.0 + r) ** -i
        for name in (*COMPONENTS, "maintenance"):
            v = getattr(year, name) * factor
            (costs if v > 0 else benefits).append(abs(v))
    total_cost = math.fsum(costs)
    if total_cost == 0:
        return None
    return math.fsum(benefits) / total_cost


def sensitivity(ledger: AppraisalLedger, unit: UnitValues, perturbation: float = 0.1) -> dict[str, float]:
    """Share of NPV swing attributable to each unit price.

    Each price (time, fuel, emission, accident) is moved by +/- perturbation
    on its own; the NPV swing of price p is |NPV(+) - NPV(-)| and the shares
    are the swings normalised to sum to 1.
    """
    if not perturbation > 0:
        raise InputError(f"perturbation must be > 0, got {perturbation}")
    r = unit.discount_rate
    swings = {}
    for name in COMPONENTS:
        up = ledger_npv(ledger.scaled({name: 1.0 + perturbation}), r)
        down = ledger_npv(ledger.scaled({name: 1.0 - perturbation}), r)
        swings[name] = abs(up - down)
    total = math.fsum(swings.values())
    if total == 0:
        raise InputError(f"{ledger.name}: NPV does not respond to any unit price")
    return {name: s / total for name, s in swings.items()}


@dataclass(frozen=True)
class ScenarioResult:
    name: str
    npv: float
    payback_year: int | None
    bc_ratio: float | None
    initial_cost: float


@dataclass(frozen=True)
class Comparison:
    """Scenarios best first, plus NPV ratios keyed by (numerator, denominator)."""

    ranking: tuple[ScenarioResult, ...]
    npv_ratio: Mapping[tuple[str, str], float | None]


def summarize(ledger: AppraisalLedger, r: float) -> ScenarioResult:
    return ScenarioResult(
        ledger.name,
        ledger_npv(ledger, r),
        payback_year(ledger.initial_cost, ledger.cash_flows(), r),
        bc_ratio(ledger, r),
        ledger.initial_cost,
    )


def compare_scenarios(ledgers: Sequence[AppraisalLedger], r: float) -> Comparison:
    """Rank by NPV (descending), then earlier payback, then name."""
    if len(ledgers) < 2:
        raise InputError("comparison needs at least two ledgers")
    horizons = {lg.horizon for lg in ledgers}
    if len(horizons) != 1:
        raise InputError(f"ledgers cover different horizons: {sorted(horizons)}")
    names = [lg.name for lg in ledgers]
    if len(set(names)) != len(names):
        raise InputError(f"duplicate scenario names in {names}")
    results = [summarize(lg, r) for lg in ledgers]
    never = math.inf
    ranking = sorted(
        results, key=lambda s: (-s.npv, s.payback_year if s.payback_year is not None else never, s.name)
    )
    ratios = {}
    for a in results:
        for b in results:
            if a.name != b.name:
                ratios[(a.name, b.name)] = a.npv / b.npv if b.npv != 0 else None
    return Comparison(tuple(ranking), ratios)
