"""Static user-equilibrium assignment (Frank-Wolfe) and skim extraction.

Demand matrices are dense ``(n_zones, n_zones)`` arrays in PCE/hour,
ordered like ``Network.zone_ids``. Diagonal (intrazonal) cells are never
loaded onto the network.
"""

from __future__ import annotations

import csv
import logging
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

import numpy as np

from .errors import InputError, ParseError, UnreachableError
from .netgraph import Network, shortest_path_tree
from .netgraph.paths import tree_unchecked

log = logging.getLogger(__name__)

LINE_SEARCH_STEPS = 40


@dataclass(frozen=True)
class AssignmentOptions:
    max_iterations: int = 500
    relative_gap_target: float = 1e-4
    line_search: Literal["exact-bisection", "msa"] = "exact-bisection"

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.relative_gap_target > 0:
            raise ValueError("relative_gap_target must be > 0")
        if self.line_search not in ("exact-bisection", "msa"):
            raise ValueError(f"unknown line search {self.line_search!r}")


@dataclass
class FlowState:
    flows: np.ndarray
    times: np.ndarray
    beckmann_value: float
    gap_history: list[float] = field(default_factory=list)
    beckmann_history: list[float] = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.gap_history)

    @property
    def relative_gap(self) -> float:
        return self.gap_history[-1] if self.gap_history else math.nan


def _check_od(net: Network, od) -> np.ndarray:
    od = np.asarray(od, dtype=float)
    n = net.n_zones
    if od.shape != (n, n):
        raise InputError(f"demand matrix must be {n}x{n}, got {od.shape}")
    if not np.all(np.isfinite(od)) or np.any(od < 0):
        raise InputError("demand matrix must be finite and non-negative")
    return od


def link_times(net: Network, flows) -> np.ndarray:
    return net.arrays.times(np.asarray(flows, dtype=float))


def _load(net: Network, od: np.ndarray, link_costs) -> tuple[np.ndarray, float]:
    """All-or-nothing loading; also returns the total shortest-path cost."""
    flows = np.zeros(net.n_links)
    sp_total = 0.0
    zones = net.zone_ids
    links = net.links
    costs = [float(c) for c in link_costs]
    if len(costs) != net.n_links or not all(c >= 0 for c in costs):
        raise ValueError("link costs must be one non-negative value per link")
    for i, origin in enumerate(zones):
        row = od[i].tolist()
        if not any(v > 0 for v in row):
            continue
        tree = tree_unchecked(net, origin, costs)
        for j, dest in enumerate(zones):
            demand = row[j]
            if j == i or demand <= 0:
                continue
            if dest in tree.unreachable:
                raise UnreachableError(origin, dest)
            sp_total += demand * tree.cost[dest]
            node = dest
            while node != origin:
                li = tree.pred_link[node]
                flows[li] += demand
                node = links[li].from_node
    return flows, sp_total


def all_or_nothing(net: Network, od, link_costs) -> np.ndarray:
    """Load every OD cell onto its single shortest path under ``link_costs``."""
    od = _check_od(net, od)
    costs = np.asarray(link_costs, dtype=float)
    if np.any(costs < 0):
        raise InputError("link costs must be non-negative")
    return _load(net, od, costs)[0]


def beckmann(net: Network, flows) -> float:
    """Sum over links of the integral of the BPR function from 0 to the flow."""
    x = np.asarray(flows, dtype=float)
    if np.any(x < 0):
        raise ValueError("flows must be non-negative")
    a = net.arrays
    integral = a.fft * (x + a.alpha * x ** (a.beta + 1) / ((a.beta + 1) * a.capacity**a.beta))
    return math.fsum(integral)


def relative_gap(net: Network, flows, od) -> float:
    """(total cost - shortest-path cost at current times) / total cost."""
    od = _check_od(net, od)
    x = np.asarray(flows, dtype=float)
    t = link_times(net, x)
    total = math.fsum(t * x)
    if total <= 0:
        raise ValueError("relative gap undefined: total network cost is zero")
    _, sp_total = _load(net, od, t)
    return (total - sp_total) / total


def _bisection_step(net: Network, x: np.ndarray, d: np.ndarray) -> float:
    """Step in [0, 1] minimising the Beckmann objective along ``d``.

    Returns the lower end of the final bracket, where the directional
    derivative is still negative, so the objective cannot increase.
    """
    times = net.arrays.times

    def slope(lam):
        return float(np.dot(times(x + lam * d), d))

    if slope(1.0) <= 0:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(LINE_SEARCH_STEPS):
        mid = 0.5 * (lo + hi)
        if slope(mid) < 0:
            lo = mid
        else:
            hi = mid
    return lo


def frank_wolfe(net: Network, od, opts: AssignmentOptions | None = None) -> FlowState:
    """User-equilibrium link flows for ``od`` (PCE/hour).

    Non-convergence within ``opts.max_iterations`` is reported through
    ``FlowState.converged`` rather than raised.
    """
    opts = opts or AssignmentOptions()
    od = _check_od(net, od)
    off_diag = od.copy()
    np.fill_diagonal(off_diag, 0.0)
    arr = net.arrays
    if not np.any(off_diag > 0):
        zero = np.zeros(net.n_links)
        return FlowState(zero, arr.fft.copy(), 0.0, [0.0], [0.0], converged=True)

    x, _ = _load(net, od, arr.fft)
    state = FlowState(x, arr.times(x), beckmann(net, x))
    state.beckmann_history.append(state.beckmann_value)
    for k in range(1, opts.max_iterations + 1):
        t = arr.times(x)
        y, sp_total = _load(net, od, t)
        total = math.fsum(t * x)
        gap = (total - sp_total) / total
        state.gap_history.append(gap)
        if gap <= opts.relative_gap_target:
            state.converged = True
            break
        if k == opts.max_iterations:
            break
        d = y - x
        if opts.line_search == "msa":
            lam = 1.0 / (k + 1)
        else:
            lam = _bisection_step(net, x, d)
        x = np.maximum(x + lam * d, 0.0)
        state.beckmann_history.append(beckmann(net, x))

    state.flows = x
    state.times = arr.times(x)
    state.beckmann_value = state.beckmann_history[-1]
    if not state.converged:
        log.warning(
            "Frank-Wolfe stopped after %d iterations at relative gap %.3e (target %.1e)",
            state.iterations,
            state.relative_gap,
            opts.relative_gap_target,
        )
    return state


@dataclass(frozen=True)
class Skims:
    time: np.ndarray  # minutes
    distance: np.ndarray  # km
    unreachable: tuple[tuple[int, int], ...] = ()


def skims(net: Network, flows) -> Skims:
    """Zone-to-zone shortest-path time at loaded link times, and the distance along that path."""
    t = link_times(net, flows)
    n = net.n_zones
    time = np.zeros((n, n))
    dist = np.zeros((n, n))
    missing = []
    lengths = net.arrays.length
    for i, origin in enumerate(net.zone_ids):
        tree = shortest_path_tree(net, origin, t)
        for j, dest in enumerate(net.zone_ids):
            if i == j:
                continue
            if dest in tree.unreachable:
                time[i, j] = dist[i, j] = math.inf
                missing.append((origin, dest))
                continue
            time[i, j] = tree.cost[dest]
            dist[i, j] = math.fsum(lengths[tree.path_links(net, dest)])
    return Skims(time, dist, tuple(missing))


def write_flows(net: Network, state: FlowState, path: str | os.PathLike) -> None:
    """CSV ``from,to,flow,time,v_over_c``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["from", "to", "flow", "time", "v_over_c"])
        for lk, x, t in zip(net.links, state.flows, state.times):
            w.writerow([lk.from_node, lk.to_node, repr(float(x)), repr(float(t)), repr(float(x / lk.capacity))])


def read_demand(path: str | os.PathLike, net: Network) -> np.ndarray:
    """Demand as CSV ``origin,dest,pce_per_hour`` or as a TNTP trips file."""
    path = Path(path)
    text = path.read_text()
    if text.lstrip().startswith("<") or "Origin" in text.split("\n", 1)[0]:
        return _parse_tntp_trips(text, path, net)
    pos = {z: k for k, z in enumerate(net.zone_ids)}
    od = np.zeros((net.n_zones, net.n_zones))
    reader = csv.reader(text.splitlines())
    header = [h.strip() for h in next(reader, [])]
    if header[:3] != ["origin", "dest", "pce_per_hour"]:
        raise ParseError("expected header origin,dest,pce_per_hour", path, 1, 1)
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            o, d, v = int(row[0]), int(row[1]), float(row[2])
        except (ValueError, IndexError):
            raise ParseError(f"bad demand row {row!r}", path, lineno, 1) from None
        if o not in pos or d not in pos:
            raise ParseError(f"unknown zone in {o}->{d}", path, lineno, 1)
        od[pos[o], pos[d]] += v
    return od


def _parse_tntp_trips(text: str, path, net: Network) -> np.ndarray:
    pos = {z: k for k, z in enumerate(net.zone_ids)}
    od = np.zeros((net.n_zones, net.n_zones))
    origin = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("~", 1)[0].strip()
        if not line or line.startswith("<"):
            continue
        if line.startswith("Origin"):
            try:
                origin = int(line.split()[1])
            except (ValueError, IndexError):
                raise ParseError("bad Origin line", path, lineno, 1) from None
            if origin not in pos:
                raise ParseError(f"unknown origin zone {origin}", path, lineno, 8)
            continue
        if origin is None:
            raise ParseError("demand entry before any Origin line", path, lineno, 1)
        for entry in line.split(";"):
            if not entry.strip():
                continue
            dest, sep, val = entry.partition(":")
            col = raw.find(entry.strip()) + 1
            try:
                d, v = int(dest), float(val)
            except ValueError:
                raise ParseError(f"bad entry {entry.strip()!r}", path, lineno, col) from None
            if not sep or d not in pos:
                raise ParseError(f"bad entry {entry.strip()!r}", path, lineno, col)
            od[pos[origin], pos[d]] += v
    return od
