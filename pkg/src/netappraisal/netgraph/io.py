"""Readers and writers for the network and scenario text formats.

Network file (TNTP flavoured)::

    <NUMBER OF ZONES> 4
    <NUMBER OF NODES> 6
    <NUMBER OF LINKS> 9
    <END OF METADATA>
    ~ from to capacity length free_flow_time alpha beta accident_mult ;
    1 5 1800 0.8 1.2 0.15 4 1.0 ;

Zones are nodes ``1..NUMBER OF ZONES``; nodes are ``1..NUMBER OF NODES``.
The trailing ``alpha beta accident_mult`` columns are optional.

Scenario file::

    name = directional
    [construction]
    set 5 6 capacity 900
    [operation]
    node 101
    add 5 101 2400 0.4 0.3 0.15 4 1.0
    remove 6 5
    [costs]
    construction = 40.3
    acquisition = 16.4
    maintenance = 0.55

Costs are given in millions of currency units.
"""

from __future__ import annotations

import os
from decimal import Decimal
from pathlib import Path

from ..errors import ParseError
from .network import DEFAULT_ALPHA, DEFAULT_BETA, LINK_FIELDS, Link, Network
from .scenario import AddLink, AddNode, DirectCosts, RemoveLink, RemoveNode, ScenarioDelta, SetField

FIELD_ALIASES = {
    "alpha": "vdf_alpha",
    "b": "vdf_alpha",
    "beta": "vdf_beta",
    "power": "vdf_beta",
    "fft": "free_flow_time",
    "accident_mult": "accident_rate_multiplier",
}

_META_KEYS = {
    "NUMBER OF ZONES": "zones",
    "NUMBER OF NODES": "nodes",
    "NUMBER OF LINKS": "links",
    "FIRST THRU NODE": "first_thru",
}


def _split_tokens(text: str) -> list[tuple[str, int]]:
    """Whitespace tokens with their 1-based column."""
    out = []
    col = 0
    for tok in text.split():
        col = text.index(tok, col)
        out.append((tok, col + 1))
        col += len(tok)
    return out


def _number(tok: str, col: int, path, lineno: int, kind=float):
    try:
        return kind(tok)
    except ValueError:
        raise ParseError(f"expected {kind.__name__}, got {tok!r}", path, lineno, col) from None


def _link_from_tokens(tokens, path, lineno: int) -> Link:
    if len(tokens) < 5:
        col = tokens[-1][1] if tokens else 1
        raise ParseError(
            "link row needs at least: from to capacity length free_flow_time", path, lineno, col
        )
    if len(tokens) > 8:
        raise ParseError(f"unexpected token {tokens[8][0]!r}", path, lineno, tokens[8][1])
    vals = [_number(t, c, path, lineno, int if k < 2 else float) for k, (t, c) in enumerate(tokens)]
    defaults = [DEFAULT_ALPHA, DEFAULT_BETA, 1.0]
    alpha, beta, acc = vals[5:] + defaults[len(vals) - 5 :]
    return Link(
        from_node=vals[0],
        to_node=vals[1],
        capacity=vals[2],
        length=vals[3],
        free_flow_time=vals[4],
        vdf_alpha=alpha,
        vdf_beta=beta,
        accident_rate_multiplier=acc,
    )


def parse_network(text: str, path="<string>", name: str = "") -> Network:
    return parse_network_lines(text, path, name)[0]


def parse_network_lines(text: str, path="<string>", name: str = "") -> tuple[Network, list[int]]:
    """Parse a network and also return the source line of every link row."""
    meta: dict[str, int] = {}
    links: list[Link] = []
    lines: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("~", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.lstrip()
        if stripped.startswith("<"):
            tag, sep, val = stripped[1:].partition(">")
            col = len(line) - len(stripped) + 1
            if not sep:
                raise ParseError("unterminated metadata tag", path, lineno, col)
            tag = tag.strip().upper()
            if tag == "END OF METADATA":
                continue
            if tag not in _META_KEYS:
                raise ParseError(f"unknown metadata tag <{tag}>", path, lineno, col)
            meta[_META_KEYS[tag]] = _number(val.strip(), col, path, lineno, int)
            continue
        body = line.rstrip()
        if body.endswith(";"):
            body = body[:-1]
        links.append(_link_from_tokens(_split_tokens(body), path, lineno))
        lines.append(lineno)

    for key in ("zones", "nodes"):
        if key not in meta:
            tag = next(k for k, v in _META_KEYS.items() if v == key)
            raise ParseError(f"missing <{tag}> header", path, 1, 1)
    if "links" in meta and meta["links"] != len(links):
        raise ParseError(
            f"<NUMBER OF LINKS> says {meta['links']} but {len(links)} rows found", path, 1, 1
        )
    net = Network.build(
        links,
        zone_ids=range(1, meta["zones"] + 1),
        node_ids=range(1, meta["nodes"] + 1),
        name=name,
    )
    return net, lines


def read_network(path: str | os.PathLike) -> Network:
    path = Path(path)
    return parse_network(path.read_text(), path, name=path.stem)


def format_network(net: Network) -> str:
    lines = [
        f"<NUMBER OF ZONES> {net.n_zones}",
        f"<NUMBER OF NODES> {len(net.nodes)}",
        f"<NUMBER OF LINKS> {net.n_links}",
        "<END OF METADATA>",
        "~ from to capacity length free_flow_time alpha beta accident_mult ;",
    ]
    for lk in net.links:
        lines.append(
            f"{lk.from_node} {lk.to_node} {lk.capacity!r} {lk.length!r} {lk.free_flow_time!r} "
            f"{lk.vdf_alpha!r} {lk.vdf_beta!r} {lk.accident_rate_multiplier!r} ;"
        )
    return "\n".join(lines) + "\n"


def write_network(net: Network, path: str | os.PathLike) -> None:
    Path(path).write_text(format_network(net))


def _field_name(tok: str, col: int, path, lineno: int) -> str:
    name = FIELD_ALIASES.get(tok.lower(), tok.lower())
    if name not in LINK_FIELDS:
        raise ParseError(f"unknown link field {tok!r}", path, lineno, col)
    return name


_COST_KEYS = {
    "construction": "construction",
    "acquisition": "acquisition",
    "maintenance": "annual_maintenance",
    "annual_maintenance": "annual_maintenance",
}
MILLION = 1_000_000


def parse_scenario(text: str, path="<string>", default_name: str = "scenario") -> ScenarioDelta:
    name = default_name
    section = None
    edits: dict[str, list] = {"construction": [], "operation": []}
    costs: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        stripped = line.strip()
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ParseError("unterminated section header", path, lineno, indent + 1)
            section = stripped[1:-1].strip().lower()
            if section not in ("construction", "operation", "costs"):
                raise ParseError(f"unknown section [{section}]", path, lineno, indent + 2)
            continue
        if section is None or section == "costs":
            key, sep, val = stripped.partition("=")
            key = key.strip().lower()
            if not sep:
                raise ParseError("expected 'key = value'", path, lineno, indent + 1)
            val_col = line.index("=") + 2
            if section is None:
                if key != "name":
                    raise ParseError(f"unexpected key {key!r} before sections", path, lineno, indent + 1)
                name = val.strip()
            else:
                if key not in _COST_KEYS:
                    raise ParseError(f"unknown cost {key!r}", path, lineno, indent + 1)
                costs[_COST_KEYS[key]] = float(Decimal(repr(_number(val.strip(), val_col, path, lineno))) * MILLION)
            continue
        tokens = _split_tokens(line)
        verb, vcol = tokens[0]
        args = tokens[1:]
        verb = verb.lower()
        if verb == "set":
            if len(args) != 4:
                raise ParseError("expected: set from to field value", path, lineno, vcol)
            edit = SetField(
                _number(*args[0], path, lineno, int),
                _number(*args[1], path, lineno, int),
                _field_name(*args[2], path, lineno),
                _number(*args[3], path, lineno),
            )
        elif verb == "remove":
            if len(args) != 2:
                raise ParseError("expected: remove from to", path, lineno, vcol)
            edit = RemoveLink(_number(*args[0], path, lineno, int), _number(*args[1], path, lineno, int))
        elif verb == "add":
            edit = AddLink(_link_from_tokens(args, path, lineno))
        elif verb == "node":
            if len(args) != 1:
                raise ParseError("expected: node id", path, lineno, vcol)
            edit = AddNode(_number(*args[0], path, lineno, int))
        elif verb == "drop-node":
            if len(args) != 1:
                raise ParseError("expected: drop-node id", path, lineno, vcol)
            edit = RemoveNode(_number(*args[0], path, lineno, int))
        else:
            raise ParseError(f"unknown edit verb {verb!r}", path, lineno, vcol)
        edits[section].append(edit)
    return ScenarioDelta(
        name=name,
        construction=tuple(edits["construction"]),
        operation=tuple(edits["operation"]),
        direct_costs=DirectCosts(**costs),
    )


def read_scenario(path: str | os.PathLike) -> ScenarioDelta:
    path = Path(path)
    return parse_scenario(path.read_text(), path, default_name=path.stem)
