"""Road network data model and volume-delay evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

DEFAULT_ALPHA = 0.15
DEFAULT_BETA = 4.0

LINK_FIELDS = (
    "capacity",
    "length",
    "free_flow_time",
    "vdf_alpha",
    "vdf_beta",
    "accident_rate_multiplier",
)


@dataclass(frozen=True)
class Node:
    id: int
    is_centroid: bool = False


@dataclass(frozen=True)
class Link:
    """Directed link. ``capacity`` is PCE/hour, ``free_flow_time`` minutes, ``length`` km.

    BPR closure: t(v) = free_flow_time * (1 + vdf_alpha * (v / capacity) ** vdf_beta)
    """

    from_node: int
    to_node: int
    length: float
    free_flow_time: float
    capacity: float
    vdf_alpha: float = DEFAULT_ALPHA
    vdf_beta: float = DEFAULT_BETA
    accident_rate_multiplier: float = 1.0

    @property
    def key(self) -> tuple[int, int]:
        return (self.from_node, self.to_node)


@dataclass(frozen=True)
class Network:
    """Immutable directed network.

    ``links`` is ordered; the position of a link is its index everywhere
    (flow vectors, tie-breaking, reports). ``zone_ids`` lists centroid node
    ids in OD-matrix order.
    """

    nodes: tuple[Node, ...]
    links: tuple[Link, ...]
    zone_ids: tuple[int, ...]
    name: str = field(default="", compare=False)

    @classmethod
    def build(
        cls,
        links: Iterable[Link],
        zone_ids: Iterable[int],
        node_ids: Iterable[int] | None = None,
        name: str = "",
    ) -> "Network":
        links = tuple(links)
        zone_ids = tuple(int(z) for z in zone_ids)
        if node_ids is None:
            ids = set(zone_ids)
            for lk in links:
                ids.update(lk.key)
            node_ids = sorted(ids)
        zones = set(zone_ids)
        nodes = tuple(Node(int(i), int(i) in zones) for i in node_ids)
        return cls(nodes, links, zone_ids, name)

    def replace_links(self, links: Iterable[Link]) -> "Network":
        return Network(self.nodes, tuple(links), self.zone_ids, self.name)

    @property
    def n_links(self) -> int:
        return len(self.links)

    @property
    def n_zones(self) -> int:
        return len(self.zone_ids)

    @cached_property
    def node_ids(self) -> tuple[int, ...]:
        return tuple(n.id for n in self.nodes)

    @cached_property
    def link_index(self) -> dict[tuple[int, int], int]:
        """(from, to) -> index of the first link with that key."""
        out: dict[tuple[int, int], int] = {}
        for i, lk in enumerate(self.links):
            out.setdefault(lk.key, i)
        return out

    @cached_property
    def out_links(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {n.id: [] for n in self.nodes}
        for i, lk in enumerate(self.links):
            adj.setdefault(lk.from_node, []).append(i)
        return {k: tuple(v) for k, v in adj.items()}

    @cached_property
    def arrays(self) -> "LinkArrays":
        return LinkArrays.from_links(self.links)

    def zone_position(self, zone_id: int) -> int:
        return self.zone_ids.index(zone_id)


@dataclass(frozen=True)
class LinkArrays:
    """Column view of the link table used by the vectorised solvers."""

    from_node: np.ndarray
    to_node: np.ndarray
    length: np.ndarray
    fft: np.ndarray
    capacity: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    accident: np.ndarray

    @classmethod
    def from_links(cls, links) -> "LinkArrays":
        def col(attr, dtype=float):
            return np.array([getattr(lk, attr) for lk in links], dtype=dtype)

        return cls(
            col("from_node", int),
            col("to_node", int),
            col("length"),
            col("free_flow_time"),
            col("capacity"),
            col("vdf_alpha"),
            col("vdf_beta"),
            col("accident_rate_multiplier"),
        )

    def times(self, flows: np.ndarray) -> np.ndarray:
        return self.fft * (1.0 + self.alpha * (flows / self.capacity) ** self.beta)


def bpr_time(link: Link, flow: float) -> float:
    """Congested travel time in minutes for ``flow`` PCE/hour on ``link``."""
    if flow < 0:
        raise ValueError(f"flow must be non-negative, got {flow}")
    ratio = flow / link.capacity
    return link.free_flow_time * (1.0 + link.vdf_alpha * ratio**link.vdf_beta)


def validate_network(net: Network) -> list[str]:
    """Return one human-readable defect string per violated invariant.

    Checks node id uniqueness, centroid bookkeeping, link field ranges,
    dangling endpoints and zone-to-zone reachability. Parallel links are
    allowed.
    An empty list means the network is usable for assignment.
    """
    defects: list[str] = []
    seen: set[int] = set()
    for node in net.nodes:
        if node.id in seen:
            defects.append(f"duplicate node id: node {node.id}")
        seen.add(node.id)

    zones = set(net.zone_ids)
    if len(zones) != len(net.zone_ids):
        defects.append("duplicate zone id in zone list")
    centroids = {n.id for n in net.nodes if n.is_centroid}
    for z in net.zone_ids:
        if z not in seen:
            defects.append(f"zone without node: zone {z}")
    if centroids != zones & seen:
        defects.append(
            f"centroid count mismatch: {len(centroids)} centroid nodes for {len(zones)} zones"
        )

    for i, lk in enumerate(net.links):
        where = f"link #{i} ({lk.from_node}->{lk.to_node})"
        for end in lk.key:
            if end not in seen:
                defects.append(f"dangling endpoint: {where} references absent node {end}")
        if not lk.length >= 0:
            defects.append(f"length must be >= 0: {where} has {lk.length}")
        if not lk.free_flow_time > 0:
            defects.append(f"free_flow_time must be > 0: {where} has {lk.free_flow_time}")
        if not lk.capacity > 0:
            defects.append(f"capacity must be > 0: {where} has {lk.capacity}")
        if not lk.vdf_beta >= 1:
            defects.append(f"vdf_beta must be >= 1: {where} has {lk.vdf_beta}")
        if not lk.vdf_alpha >= 0:
            defects.append(f"vdf_alpha must be >= 0: {where} has {lk.vdf_alpha}")
        if not lk.accident_rate_multiplier >= 0:
            defects.append(
                f"accident_rate_multiplier must be >= 0: {where} has {lk.accident_rate_multiplier}"
            )

    defects.extend(_reachability_defects(net, seen))
    return defects


def _reachability_defects(net: Network, node_ids: set[int]) -> list[str]:
    adj: dict[int, list[int]] = {}
    for lk in net.links:
        if lk.from_node in node_ids and lk.to_node in node_ids:
            adj.setdefault(lk.from_node, []).append(lk.to_node)
    zones = [z for z in net.zone_ids if z in node_ids]
    missing: dict[tuple[int, int], list[str]] = {}
    for origin in zones:
        reached = {origin}
        stack = [origin]
        while stack:
            u = stack.pop()
            for v in adj.get(u, ()):
                if v not in reached:
                    reached.add(v)
                    stack.append(v)
        for dest in zones:
            if dest != origin and dest not in reached:
                pair = (min(origin, dest), max(origin, dest))
                missing.setdefault(pair, []).append(f"{origin}->{dest}")
    return [
        f"unreachable zone pair: {a} <-> {b} ({', '.join(dirs)})"
        for (a, b), dirs in sorted(missing.items())
    ]
