"""Person trips to vehicle trips to passenger-car equivalents."""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from ..errors import InputError

PCE_FACTORS: Mapping[str, float] = MappingProxyType({
    "car": 1.0,
    "pickup": 1.0,
    "taxi": 2.0,
    "minibus": 2.5,
    "bus": 2.5,
    "motorcycle": 0.5,
    "lorry": 2.5,
})  # fmt: skip

# persons per vehicle; placeholders, override in the run config
DEFAULT_OCCUPANCY: Mapping[str, float] = MappingProxyType({
    "car": 1.5,
    "taxi": 2.5,
    "motorcycle": 1.1,
    "minibus": 12.0,
})  # fmt: skip


@dataclass(frozen=True)
class VehicleConversion:
    occupancy: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_OCCUPANCY))
    pce: Mapping[str, float] = field(default_factory=lambda: dict(PCE_FACTORS))

    def __post_init__(self):
        for mode, occ in self.occupancy.items():
            if not occ > 0:
                raise InputError(f"occupancy for {mode!r} must be > 0, got {occ}")
        for cls, f in self.pce.items():
            if not f > 0:
                raise InputError(f"PCE factor for {cls!r} must be > 0, got {f}")


def vehicles_from_persons(od, conv: VehicleConversion, mode: str) -> np.ndarray:
    """Vehicle trips for ``mode``: person trips divided by average occupancy.

    Bus passengers ride a scheduled service, so bus has no conversion.
    """
    if mode == "bus":
        raise InputError("bus person trips are not converted to vehicle trips")
    try:
        occ = conv.occupancy[mode]
    except KeyError:
        raise InputError(f"no occupancy configured for mode {mode!r}") from None
    return np.asarray(od, dtype=float) / occ


def pce_matrix(vehicle_ods: Mapping[str, np.ndarray], conv: VehicleConversion, shape=None) -> np.ndarray:
    """Sum of PCE factor times vehicle OD over vehicle classes."""
    total = None
    for cls, od in vehicle_ods.items():
        if cls not in conv.pce:
            raise InputError(f"unknown vehicle class {cls!r}")
        term = conv.pce[cls] * np.asarray(od, dtype=float)
        total = term if total is None else total + term
    if total is None:
        return np.zeros(shape if shape is not None else (0, 0))
    return total
