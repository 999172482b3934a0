"""Year-by-year demand, assignment and appraisal over the horizon."""

from __future__ import annotations

import csv
import io
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ..appraise import (
    AnnualMetrics,
    AppraisalLedger,
    Comparison,
    assemble_ledger,
    compare_scenarios,
    emissions_kg,
    fuel_liters,
)
from ..assign import FlowState, frank_wolfe, skims as congested_skims
from ..demand import (
    SkimSet,
    TripEnds,
    ZoneAttributes,
    balance_attractions,
    demand_deviation,
    fill_intrazonal,
    gravity_distribute,
    mode_shares,
    mode_utility,
    pce_matrix,
    read_skims,
    read_zones,
    trip_ends,
    vehicles_from_persons,
)
from ..errors import DefectError, InputError, ParseError, ScenarioEditError
from ..netgraph import Network, ScenarioDelta, apply_scenario, parse_network_lines, read_scenario, validate_network
from .config import RunConfig

log = logging.getLogger(__name__)

STATUS_QUO = "status-quo"
NON_ROAD_MODES = frozenset({"bus", "bicycle", "walk"})
FREIGHT_CLASS = "lorry"
_NAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")


# --- inputs ---


@dataclass(frozen=True)
class Inputs:
    network: Network
    zones: tuple[ZoneAttributes, ...]
    skims: SkimSet
    scenarios: tuple[ScenarioDelta, ...]
    freight: np.ndarray | None = None


def _network_defects(net: Network, path: Path, lines: Sequence[int]) -> list[str]:
    out = []
    for d in validate_network(net):
        m = re.search(r"link #(\d+)", d)
        out.append(f"{path}:{lines[int(m.group(1))]}: {d}" if m else f"{path}: {d}")
    return out


def read_freight(path, zone_ids: Sequence[int]) -> np.ndarray:
    """CSV ``origin,dest,vehicles_per_day`` of goods vehicles."""
    path = Path(path)
    pos = {z: k for k, z in enumerate(zone_ids)}
    od = np.zeros((len(zone_ids), len(zone_ids)))
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        if header[:3] != ["origin", "dest", "vehicles_per_day"]:
            raise ParseError("expected header origin,dest,vehicles_per_day", path, 1, 1)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                o, d, v = int(row[0]), int(row[1]), float(row[2])
            except (ValueError, IndexError):
                raise ParseError(f"bad freight row {row!r}", path, lineno, 1) from None
            if o not in pos or d not in pos:
                raise ParseError(f"unknown zone in {o}->{d}", path, lineno, 1)
            if not (math.isfinite(v) and v >= 0):
                raise ParseError(f"vehicles_per_day must be >= 0, got {v}", path, lineno, 1)
            od[pos[o], pos[d]] += v
    return od


def load_inputs(config: RunConfig) -> Inputs:
    """Read and validate every input file.

    Parse failures raise ``ParseError`` with file, line and column; semantic
    problems are collected across all files and raised together as a
    ``DefectError``.
    """
    p = config.paths
    try:
        text = p.network.read_text()
    except OSError as exc:
        raise InputError(f"cannot read network {p.network}: {exc.strerror}") from None
    net, lines = parse_network_lines(text, p.network, name=p.network.stem)
    defects = _network_defects(net, p.network, lines)

    zones = tuple(read_zones(p.zones))
    if len(zones) != net.n_zones:
        defects.append(f"{p.zones}: {len(zones)} zone rows for {net.n_zones} network zones")
    for k, z in enumerate(zones):
        defects.extend(f"{p.zones}:{k + 2}: {d}" for d in z.defects())

    skims = read_skims(p.skims, p.ownership, net.zone_ids)
    defects.extend(f"{p.skims}: {d}" for d in skims.defects())

    scenarios = []
    for path in p.scenarios:
        delta = read_scenario(path)
        if not _NAME_RE.match(delta.name) or delta.name == STATUS_QUO:
            defects.append(f"{path}: invalid scenario name {delta.name!r}")
        for phase in ("construction", "operation"):
            try:
                edited = apply_scenario(net, delta, phase)
            except ScenarioEditError as exc:
                defects.append(f"{path}: [{phase}] {exc}")
                continue
            defects.extend(f"{path}: [{phase}] {d}" for d in validate_network(edited))
        scenarios.append(delta)
    names = [s.name for s in scenarios]
    for name in sorted({n for n in names if names.count(n) > 1}):
        defects.append(f"duplicate scenario name {name!r}")
    if config.selected_scenarios:
        unknown = [n for n in config.selected_scenarios if n not in names]
        if unknown:
            defects.append(f"selected scenario(s) not found: {unknown}")
        scenarios = [s for s in scenarios if s.name in config.selected_scenarios]

    freight = read_freight(p.freight, net.zone_ids) if p.freight is not None else None
    if defects:
        raise DefectError(defects, "inputs")
    return Inputs(net, zones, skims, tuple(scenarios), freight)


# --- demand stages ---


def grown_zones(zones: Sequence[ZoneAttributes], growth: Mapping[str, float], year: int) -> list[ZoneAttributes]:
    factors = {k: g**year for k, g in growth.items()}
    return [z.grown(factors) for z in zones]


def distribute(zones: Sequence[ZoneAttributes], skims: SkimSet, config: RunConfig) -> dict[str, np.ndarray]:
    """Person trips per purpose: generation, balancing and gravity distribution."""
    s = config.demand
    impedance = fill_intrazonal(skims.pairs["TIMCAR"], s.intrazonal_share)
    out = {}
    for purpose in s.purposes:
        ends = trip_ends(zones, purpose, s.production, s.attraction)
        total = float(ends.productions.sum())
        if total == 0:
            out[purpose] = np.zeros((len(zones), len(zones)))
            continue
        ends = balance_attractions(ends)
        out[purpose] = gravity_distribute(
            TripEnds(ends.productions, ends.attractions, purpose),
            impedance,
            tol=s.ipf_tolerance * total,
            mu=s.mu,
            max_iterations=s.ipf_max_iterations,
        )
    return out


def split_modes(person_trips: Mapping[str, np.ndarray], skims: SkimSet, config: RunConfig) -> dict[str, np.ndarray]:
    """Person trips per mode, summed over purposes, after optional diversion to bus."""
    s = config.demand
    variables = skims.matrices()
    by_mode: dict[str, list[np.ndarray]] = {}
    for purpose, od in person_trips.items():
        model = s.choice[purpose]
        utilities = {m: mode_utility(model, m, variables) for m in model.modes}
        shares = mode_shares(model, utilities)
        if s.deviation_enabled:
            shares = _divert(shares, s, purpose)
        for mode, share in shares.items():
            by_mode.setdefault(mode, []).append(od * share)
    return {m: np.sum(parts, axis=0) for m, parts in sorted(by_mode.items())}


def _divert(shares: dict, s, purpose: str) -> dict:
    if "bus" not in shares:
        raise InputError(f"{purpose}: demand diversion needs a bus mode to divert to")
    out = dict(shares)
    for mode, params in sorted(s.deviation_params.items()):
        if mode in out and mode != "bus":
            moved = demand_deviation(out[mode], params, s.deviation_delta_cost)
            out[mode] = out[mode] - moved
            out["bus"] = out["bus"] + moved
    return out


@dataclass(frozen=True)
class VehicleDemand:
    """Daily vehicle trips per class and their PCE total."""

    vehicles: Mapping[str, np.ndarray]
    pce: np.ndarray

    @property
    def vehicles_per_pce(self) -> float:
        off = ~np.eye(len(self.pce), dtype=bool)
        total_pce = math.fsum(self.pce[off])
        if total_pce == 0:
            return 1.0
        return math.fsum(math.fsum(v[off]) for v in self.vehicles.values()) / total_pce


def to_vehicles(mode_trips: Mapping[str, np.ndarray], config: RunConfig, freight: np.ndarray | None = None) -> VehicleDemand:
    conv = config.demand.conversion
    vehicles = {}
    for mode, od in mode_trips.items():
        if mode in NON_ROAD_MODES:
            continue
        vehicles[mode] = vehicles_from_persons(od, conv, mode)
    if freight is not None:
        vehicles[FREIGHT_CLASS] = np.asarray(freight, dtype=float)
    n = len(next(iter(mode_trips.values()))) if mode_trips else 0
    return VehicleDemand(vehicles, pce_matrix(vehicles, conv, shape=(n, n)))


def build_demand(zones, skims: SkimSet, config: RunConfig, year: int, freight=None) -> VehicleDemand:
    """The demand stages for one year on the given skims."""
    grown = grown_zones(zones, config.growth, year)
    skims = skims.scaled_transit(config.demand.transit_time_growth**year)
    return to_vehicles(split_modes(distribute(grown, skims, config), skims, config), config, freight)


# --- supply side ---


@dataclass(frozen=True)
class YearRun:
    metrics: AnnualMetrics
    states: tuple[FlowState, ...]
    demand: VehicleDemand


def assign_periods(net: Network, demand: VehicleDemand, config: RunConfig) -> tuple[FlowState, ...]:
    return tuple(frank_wolfe(net, demand.pce * p.hourly_fraction, config.assignment) for p in config.periods)


def year_metrics(net: Network, states: Sequence[FlowState], veh_per_pce: float, config: RunConfig) -> AnnualMetrics:
    """Annual totals from one assigned hour per period, scaled by hours per year."""
    arr = net.arrays
    moving = arr.length > 0
    hours, km, fuel, acc = [], [], [], []
    emis: dict[str, list[float]] = {}
    for period, state in zip(config.periods, states):
        h = period.hours_per_year
        veh = state.flows * veh_per_pce
        hours.append(math.fsum(veh * state.times / 60.0 * h))
        km.append(math.fsum(veh * arr.length * h))
        acc.append(math.fsum(veh * arr.length * arr.accident * h))
        speed = arr.length[moving] / (state.times[moving] / 60.0)
        fuel.append(fuel_liters(veh[moving], speed, arr.length[moving], config.fuel, hours=h))
        for p, kg in emissions_kg(veh[moving], speed, arr.length[moving], config.emissions, hours=h).items():
            emis.setdefault(p, []).append(kg)
    return AnnualMetrics(
        vehicle_hours=math.fsum(hours),
        vehicle_km=math.fsum(km),
        fuel=math.fsum(fuel),
        emissions={p: math.fsum(v) for p, v in sorted(emis.items())},
        accident_vkt=math.fsum(acc),
        converged=all(s.converged for s in states),
    )


def _blend(old: VehicleDemand, new: VehicleDemand, step: float) -> VehicleDemand:
    vehicles = {c: old.vehicles[c] + step * (new.vehicles[c] - old.vehicles[c]) for c in old.vehicles}
    return VehicleDemand(vehicles, old.pce + step * (new.pce - old.pce))


def simulate_year(net: Network, inputs: Inputs, config: RunConfig, year: int, demand: VehicleDemand | None = None) -> YearRun:
    """Demand (unless supplied), per-period assignment and annual metrics.

    With feedback enabled, the first period's congested car times replace
    TIMCAR and demand is rebuilt; successive demands are averaged with
    step 1/(k+1).
    """
    if demand is None:
        demand = build_demand(inputs.zones, inputs.skims, config, year, inputs.freight)
    states = assign_periods(net, demand, config)
    for k in range(1, config.demand.feedback_iterations + 1):
        sk = congested_skims(net, states[0].flows)
        timcar = np.where(np.isfinite(sk.time), sk.time, inputs.skims.pairs["TIMCAR"])
        np.fill_diagonal(timcar, 0.0)
        fresh = build_demand(inputs.zones, inputs.skims.with_pairs(TIMCAR=timcar), config, year, inputs.freight)
        blended = _blend(demand, fresh, 1.0 / (k + 1))
        change = float(np.abs(blended.pce - demand.pce).sum()) / max(float(demand.pce.sum()), 1e-300)
        demand = blended
        states = assign_periods(net, demand, config)
        if change < 1e-6:
            break
    return YearRun(year_metrics(net, states, demand.vehicles_per_pce, config), states, demand)


def run_year(net: Network, inputs: Inputs, config: RunConfig, year: int) -> AnnualMetrics:
    return simulate_year(net, inputs, config, year).metrics


# --- horizon ---


@dataclass(frozen=True)
class ScenarioRun:
    delta: ScenarioDelta
    ledger: AppraisalLedger
    construction: AnnualMetrics
    operation: tuple[AnnualMetrics, ...]


@dataclass(frozen=True)
class HorizonResult:
    config: RunConfig
    baseline: tuple[AnnualMetrics, ...]  # years 0..T on the unedited network
    scenarios: tuple[ScenarioRun, ...]
    comparison: Comparison | None
    flow_tables: Mapping[str, str]

    @property
    def converged(self) -> bool:
        runs = [*self.baseline]
        for s in self.scenarios:
            runs.extend([s.construction, *s.operation])
        return all(m.converged for m in runs)


FLOW_COLUMNS = ("year", "period", "from", "to", "pce_flow", "vehicles", "time", "v_over_c")


class _FlowWriter:
    def __init__(self):
        self.buf = io.StringIO()
        self.w = csv.writer(self.buf, lineterminator="\n")
        self.w.writerow(FLOW_COLUMNS)

    def add(self, net: Network, year: int, run: YearRun, config: RunConfig) -> None:
        ratio = run.demand.vehicles_per_pce
        for period, state in zip(config.periods, run.states):
            for lk, x, t in zip(net.links, state.flows, state.times):
                self.w.writerow(
                    [year, period.name, lk.from_node, lk.to_node, repr(float(x)), repr(float(x * ratio)), repr(float(t)),
                     repr(float(x / lk.capacity))]
                )  # fmt: skip

    def text(self) -> str:
        return self.buf.getvalue()


def run_horizon(config: RunConfig, inputs: Inputs | None = None) -> HorizonResult:
    """Status quo and every scenario over years 0..T, then ledgers and ranking.

    Year 0 compares the construction-phase network with the status quo;
    years 1..T compare the operating network. Identical networks in the same
    year are simulated once.
    """
    inputs = load_inputs(config) if inputs is None else inputs
    horizon = config.horizon
    demand_cache: dict[int, VehicleDemand] = {}
    run_cache: dict[tuple, YearRun] = {}

    def simulate(net: Network, year: int) -> YearRun:
        key = (net.links, net.zone_ids, year)
        if key not in run_cache:
            demand = None
            if config.demand.feedback_iterations == 0:
                if year not in demand_cache:
                    demand_cache[year] = build_demand(inputs.zones, inputs.skims, config, year, inputs.freight)
                demand = demand_cache[year]
            run_cache[key] = simulate_year(net, inputs, config, year, demand)
            if not run_cache[key].metrics.converged:
                log.warning("assignment did not converge for %s in year %d", net.name or "network", year)
        return run_cache[key]

    flows = {}
    base_writer = _FlowWriter()
    baseline = []
    for year in range(horizon + 1):
        run = simulate(inputs.network, year)
        base_writer.add(inputs.network, year, run, config)
        baseline.append(run.metrics)
    flows[STATUS_QUO] = base_writer.text()

    runs = []
    for delta in inputs.scenarios:
        writer = _FlowWriter()
        build_net = apply_scenario(inputs.network, delta, "construction")
        op_net = apply_scenario(inputs.network, delta, "operation")
        cons = simulate(build_net, 0)
        writer.add(build_net, 0, cons, config)
        operation = []
        for year in range(1, horizon + 1):
            run = simulate(op_net, year)
            writer.add(op_net, year, run, config)
            operation.append(run.metrics)
        ledger = assemble_ledger(
            delta.direct_costs,
            cons.metrics - baseline[0],
            {y: m - baseline[y] for y, m in enumerate(operation, start=1)},
            config.units,
            name=delta.name,
        )
        flows[delta.name] = writer.text()
        runs.append(ScenarioRun(delta, ledger, cons.metrics, tuple(operation)))

    comparison = compare_scenarios([r.ledger for r in runs], config.discount_rate) if len(runs) >= 2 else None
    return HorizonResult(config, tuple(baseline), tuple(runs), comparison, flows)
