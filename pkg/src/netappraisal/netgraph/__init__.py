"""Network representation, volume-delay evaluation, shortest paths and scenario edits."""

from .io import format_network, parse_network, parse_network_lines, parse_scenario, read_network, read_scenario, write_network
from .network import DEFAULT_ALPHA, DEFAULT_BETA, LINK_FIELDS, Link, Network, Node, bpr_time, validate_network
from .paths import NO_LINK, PathTree, shortest_path_tree
from .scenario import (
    PHASES,
    AddLink,
    AddNode,
    DirectCosts,
    RemoveLink,
    RemoveNode,
    ScenarioDelta,
    SetField,
    apply_edits,
    apply_scenario,
    invert_edits,
)

__all__ = [
    "AddLink",
    "AddNode",
    "DEFAULT_ALPHA",
    "DEFAULT_BETA",
    "DirectCosts",
    "LINK_FIELDS",
    "Link",
    "NO_LINK",
    "Network",
    "Node",
    "PHASES",
    "PathTree",
    "RemoveLink",
    "RemoveNode",
    "ScenarioDelta",
    "SetField",
    "apply_edits",
    "apply_scenario",
    "bpr_time",
    "format_network",
    "invert_edits",
    "parse_network",
    "parse_network_lines",
    "parse_scenario",
    "read_network",
    "read_scenario",
    "shortest_path_tree",
    "validate_network",
    "write_network",
]
