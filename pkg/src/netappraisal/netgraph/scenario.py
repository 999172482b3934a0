"""Reversible link edits that describe an interchange design."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Literal, Sequence, Union

from ..errors import ScenarioEditError
from .network import LINK_FIELDS, Link, Network, Node

Phase = Literal["construction", "operation"]
PHASES: tuple[Phase, ...] = ("construction", "operation")


@dataclass(frozen=True)
class AddLink:
    link: Link
    position: int | None = None  # None appends


@dataclass(frozen=True)
class RemoveLink:
    from_node: int
    to_node: int


@dataclass(frozen=True)
class SetField:
    from_node: int
    to_node: int
    field: str
    value: float


@dataclass(frozen=True)
class AddNode:
    id: int
    position: int | None = None


@dataclass(frozen=True)
class RemoveNode:
    """Only isolated, non-centroid nodes can be removed."""

    id: int


Edit = Union[AddLink, RemoveLink, SetField, AddNode, RemoveNode]


@dataclass(frozen=True)
class DirectCosts:
    """Direct project costs in currency units (not millions)."""

    construction: float = 0.0
    acquisition: float = 0.0
    annual_maintenance: float = 0.0


@dataclass(frozen=True)
class ScenarioDelta:
    name: str
    construction: tuple[Edit, ...] = ()
    operation: tuple[Edit, ...] = ()
    direct_costs: DirectCosts = field(default_factory=DirectCosts)

    def edits(self, phase: Phase) -> tuple[Edit, ...]:
        if phase not in PHASES:
            raise ValueError(f"unknown phase {phase!r}; expected one of {PHASES}")
        return self.construction if phase == "construction" else self.operation

    @property
    def is_null(self) -> bool:
        return not self.construction and not self.operation


def apply_edits(net: Network, edits: Sequence[Edit]) -> tuple[Network, list[Edit]]:
    """Apply ``edits`` in order; return the new network and the inverse edit list.

    Applying the returned inverse list to the new network reproduces ``net``
    exactly, including link and node order. Remove and set edits act on the
    first link with the given (from, to) pair.
    """
    links = list(net.links)
    nodes = list(net.nodes)
    inverse: list[Edit] = []
    for i, edit in enumerate(edits):
        index: dict[tuple[int, int], int] = {}
        for j, lk in enumerate(links):
            index.setdefault(lk.key, j)
        node_ids = [n.id for n in nodes]
        if isinstance(edit, AddNode):
            if edit.id in node_ids:
                raise ScenarioEditError(i, f"node {edit.id} already exists")
            pos = len(nodes) if edit.position is None else edit.position
            nodes.insert(pos, Node(edit.id, False))
            inverse.append(RemoveNode(edit.id))
        elif isinstance(edit, RemoveNode):
            if edit.id not in node_ids:
                raise ScenarioEditError(i, f"no node {edit.id} to remove")
            pos = node_ids.index(edit.id)
            if nodes[pos].is_centroid:
                raise ScenarioEditError(i, f"node {edit.id} is a zone centroid")
            if any(edit.id in key for key in index):
                raise ScenarioEditError(i, f"node {edit.id} still has links")
            nodes.pop(pos)
            inverse.append(AddNode(edit.id, pos))
        elif isinstance(edit, AddLink):
            key = edit.link.key
            if key in index:
                raise ScenarioEditError(i, f"link {key[0]}->{key[1]} already exists")
            for end in key:
                if end not in node_ids:
                    raise ScenarioEditError(i, f"link {key[0]}->{key[1]} references absent node {end}")
            pos = len(links) if edit.position is None else edit.position
            if not 0 <= pos <= len(links):
                raise ScenarioEditError(i, f"insert position {pos} out of range")
            links.insert(pos, edit.link)
            inverse.append(RemoveLink(*key))
        elif isinstance(edit, RemoveLink):
            key = (edit.from_node, edit.to_node)
            if key not in index:
                raise ScenarioEditError(i, f"no link {key[0]}->{key[1]} to remove")
            pos = index[key]
            inverse.append(AddLink(links.pop(pos), pos))
        elif isinstance(edit, SetField):
            key = (edit.from_node, edit.to_node)
            if key not in index:
                raise ScenarioEditError(i, f"no link {key[0]}->{key[1]} to modify")
            if edit.field not in LINK_FIELDS:
                raise ScenarioEditError(i, f"unknown link field {edit.field!r}")
            pos = index[key]
            old = links[pos]
            links[pos] = dataclasses.replace(old, **{edit.field: float(edit.value)})
            inverse.append(SetField(*key, edit.field, getattr(old, edit.field)))
        else:
            raise ScenarioEditError(i, f"unsupported edit {edit!r}")
    inverse.reverse()
    return Network(tuple(nodes), tuple(links), net.zone_ids, net.name), inverse


def invert_edits(net: Network, edits: Sequence[Edit]) -> list[Edit]:
    """Edit list that undoes ``edits`` once they have been applied to ``net``."""
    return apply_edits(net, edits)[1]


def apply_scenario(net: Network, delta: ScenarioDelta, phase: Phase) -> Network:
    """Network for one phase of a design. ``net`` is left untouched."""
    new, _ = apply_edits(net, delta.edits(phase))
    return new
