"""Single-origin shortest path trees with deterministic tie-breaking."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Sequence

from .network import Network

NO_LINK = -1


@dataclass(frozen=True)
class PathTree:
    """Shortest path tree rooted at ``origin``.

    ``cost`` and ``pred_link`` are keyed by node id. Unreachable nodes have
    ``cost == math.inf`` and ``pred_link == NO_LINK`` and are listed in
    ``unreachable``.
    """

    origin: int
    cost: dict[int, float]
    pred_link: dict[int, int]
    unreachable: frozenset[int]

    def path_links(self, net: Network, dest: int) -> list[int]:
        """Link indices from origin to ``dest`` in travel order."""
        if dest in self.unreachable:
            raise KeyError(f"node {dest} is unreachable from {self.origin}")
        out = []
        node = dest
        while node != self.origin:
            li = self.pred_link[node]
            out.append(li)
            node = net.links[li].from_node
        out.reverse()
        return out

    def zone_costs(self, net: Network) -> list[float]:
        return [self.cost.get(z, math.inf) for z in net.zone_ids]


def shortest_path_tree(net: Network, origin: int, link_costs: Sequence[float]) -> PathTree:
    """Dijkstra from ``origin`` over non-negative ``link_costs`` (minutes).

    Among all optimal predecessor links of a node, the one with the lowest
    link index wins. Candidates are restricted to tails settled earlier so
    zero-cost cycles can never produce a cyclic tree.
    """
    if len(link_costs) != net.n_links:
        raise ValueError(f"expected {net.n_links} link costs, got {len(link_costs)}")
    if origin not in net.out_links:
        raise KeyError(f"origin {origin} is not a node of the network")
    costs = [float(c) for c in link_costs]
    for i, c in enumerate(costs):
        if not c >= 0:
            raise ValueError(f"link #{i} has invalid cost {c}")
    return tree_unchecked(net, origin, costs)


def tree_unchecked(net: Network, origin: int, costs: list[float]) -> PathTree:
    """Dijkstra core; ``costs`` must already be a validated list of floats."""
    links = net.links
    dist: dict[int, float] = {origin: 0.0}
    order: dict[int, int] = {}
    heap = [(0.0, origin)]
    out_links = net.out_links
    while heap:
        d, u = heapq.heappop(heap)
        if u in order:
            continue
        order[u] = len(order)
        for li in out_links.get(u, ()):
            v = links[li].to_node
            nd = d + costs[li]
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))

    pred: dict[int, int] = {origin: NO_LINK}
    for li, lk in enumerate(links):
        u, v = lk.from_node, lk.to_node
        if v in pred or u not in order or v not in order:
            continue
        if order[u] < order[v] and dist[u] + costs[li] == dist[v]:
            pred.setdefault(v, li)

    all_nodes = set(net.out_links) | {lk.to_node for lk in links}
    cost = {n: dist.get(n, math.inf) for n in all_nodes}
    pred_link = {n: pred.get(n, NO_LINK) for n in all_nodes}
    unreachable = frozenset(n for n in all_nodes if n not in order)
    return PathTree(origin, cost, pred_link, unreachable)
