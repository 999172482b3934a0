"""CSV readers for zone attributes, skims and ownership."""

from __future__ import annotations

import csv
import math
import os
from pathlib import Path
from typing import Sequence

import numpy as np

from ..errors import ParseError
from .skimset import PAIR_VARIABLES, ZONE_VARIABLES, SkimSet
from .tripends import ZONE_FIELDS, ZoneAttributes


def _rows(path: Path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError("empty file", path, 1, 1)
        header = [h.strip() for h in header]
        for lineno, row in enumerate(reader, start=2):
            if row and any(c.strip() for c in row):
                yield header, lineno, row


def _header_columns(header: list[str], required: Sequence[str], path: Path) -> dict[str, int]:
    for name in required:
        if name not in header:
            raise ParseError(f"missing column {name!r}", path, 1, 1)
    return {h: k for k, h in enumerate(header)}


def _col_offset(row: list[str], k: int) -> int:
    return sum(len(c) + 1 for c in row[:k]) + 1


def _float(row, k, path, lineno) -> float:
    try:
        v = float(row[k])
    except (ValueError, IndexError):
        cell = row[k] if k < len(row) else ""
        raise ParseError(f"expected number, got {cell!r}", path, lineno, _col_offset(row, k)) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {row[k]!r}", path, lineno, _col_offset(row, k))
    return v


def read_zones(path: str | os.PathLike) -> list[ZoneAttributes]:
    """Zone attributes, one row per zone in network zone order.

    The header must name every attribute symbol; an optional leading
    ``zone`` column is ignored apart from ordering checks.
    """
    path = Path(path)
    zones = []
    cols = None
    for header, lineno, row in _rows(path):
        if cols is None:
            cols = _header_columns(header, ZONE_FIELDS, path)
        zones.append(ZoneAttributes(**{name: _float(row, cols[name], path, lineno) for name in ZONE_FIELDS}))
    if cols is None:
        with open(path) as fh:
            header = [h.strip() for h in fh.readline().split(",")]
        _header_columns(header, ZONE_FIELDS, path)
    return zones


def read_skims(skim_path, ownership_path, zone_ids: Sequence[int]) -> SkimSet:
    """Pair skims ``origin,dest,TIMCAR,...,DIST`` and zone CSV ``zone,OWNCAR,OWNMOT,DESFLAG``.

    Pairs absent from the file (normally the diagonal) are left at zero.
    """
    skim_path = Path(skim_path)
    ownership_path = Path(ownership_path)
    pos = {z: k for k, z in enumerate(zone_ids)}
    n = len(zone_ids)
    pairs = {name: np.zeros((n, n)) for name in PAIR_VARIABLES}
    cols = None
    for header, lineno, row in _rows(skim_path):
        if cols is None:
            cols = _header_columns(header, ("origin", "dest", *PAIR_VARIABLES), skim_path)
        o = int(_float(row, cols["origin"], skim_path, lineno))
        d = int(_float(row, cols["dest"], skim_path, lineno))
        if o not in pos or d not in pos:
            raise ParseError(f"unknown zone pair {o}->{d}", skim_path, lineno, 1)
        for name in PAIR_VARIABLES:
            pairs[name][pos[o], pos[d]] = _float(row, cols[name], skim_path, lineno)

    per_zone = {name: np.zeros(n) for name in ZONE_VARIABLES}
    seen = set()
    cols = None
    for header, lineno, row in _rows(ownership_path):
        if cols is None:
            cols = _header_columns(header, ("zone", *ZONE_VARIABLES), ownership_path)
        z = int(_float(row, cols["zone"], ownership_path, lineno))
        if z not in pos:
            raise ParseError(f"unknown zone {z}", ownership_path, lineno, 1)
        seen.add(z)
        for name in ZONE_VARIABLES:
            per_zone[name][pos[z]] = _float(row, cols[name], ownership_path, lineno)
    missing = [z for z in zone_ids if z not in seen]
    if missing:
        raise ParseError(f"no ownership row for zones {missing}", ownership_path, 1, 1)
    return SkimSet(pairs, per_zone["OWNCAR"], per_zone["OWNMOT"], per_zone["DESFLAG"])


def write_matrix_csv(path, od: np.ndarray, zone_ids: Sequence[int], value_name: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["origin", "dest", value_name])
        for i, o in enumerate(zone_ids):
            for j, d in enumerate(zone_ids):
                if od[i, j] != 0:
                    w.writerow([o, d, repr(float(od[i, j]))])
