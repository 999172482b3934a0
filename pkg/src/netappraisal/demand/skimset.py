"""Level-of-service inputs for mode choice."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from ..errors import InputError

PAIR_VARIABLES = ("TIMCAR", "TIMMOT", "TIMTAX", "TIMBIN", "TIMBOT", "DIST")
ZONE_VARIABLES = ("OWNCAR", "OWNMOT", "DESFLAG")


@dataclass(frozen=True)
class SkimSet:
    """Zone-pair times (minutes) and distance (km), plus per-zone ownership.

    ``pairs[name]`` is an (n, n) array. OWNCAR and OWNMOT describe the
    origin zone, DESFLAG the destination zone.
    """

    pairs: Mapping[str, np.ndarray]
    owncar: np.ndarray
    ownmot: np.ndarray
    desflag: np.ndarray

    @property
    def n_zones(self) -> int:
        return len(self.owncar)

    def defects(self) -> list[str]:
        n = self.n_zones
        out = []
        for name in PAIR_VARIABLES:
            m = self.pairs.get(name)
            if m is None:
                out.append(f"missing skim {name}")
                continue
            if m.shape != (n, n):
                out.append(f"skim {name} has shape {m.shape}, expected {(n, n)}")
            elif np.any(~np.isfinite(m)) or np.any(m < 0):
                out.append(f"skim {name} must be finite and >= 0")
        for name, arr in (("OWNCAR", self.owncar), ("OWNMOT", self.ownmot)):
            if len(arr) != n or np.any(arr < 0):
                out.append(f"{name} must have {n} non-negative entries")
        if len(self.desflag) != n or not np.all(np.isin(self.desflag, (0.0, 1.0))):
            out.append("DESFLAG must be 0/1 for every zone")
        return out

    def entry(self, i: int, j: int) -> dict[str, float]:
        out = {name: float(m[i, j]) for name, m in self.pairs.items()}
        out.update(OWNCAR=float(self.owncar[i]), OWNMOT=float(self.ownmot[i]), DESFLAG=float(self.desflag[j]))
        return out

    def matrices(self) -> dict[str, np.ndarray]:
        """Every variable as an (n, n) array, ready for vectorised utilities."""
        n = self.n_zones
        out = {name: np.asarray(m, dtype=float) for name, m in self.pairs.items()}
        out["OWNCAR"] = np.broadcast_to(self.owncar[:, None], (n, n))
        out["OWNMOT"] = np.broadcast_to(self.ownmot[:, None], (n, n))
        out["DESFLAG"] = np.broadcast_to(self.desflag[None, :], (n, n))
        return out

    def with_pairs(self, **updates: np.ndarray) -> "SkimSet":
        pairs = dict(self.pairs)
        pairs.update(updates)
        return replace(self, pairs=pairs)

    def scaled_transit(self, factor: float) -> "SkimSet":
        if factor == 1.0:
            return self
        return self.with_pairs(TIMBIN=self.pairs["TIMBIN"] * factor, TIMBOT=self.pairs["TIMBOT"] * factor)


def fill_intrazonal(m: np.ndarray, share: float = 0.5) -> np.ndarray:
    """Set zero or missing diagonal cells to ``share`` times the row's nearest neighbour."""
    out = np.array(m, dtype=float)
    n = len(out)
    if n < 2:
        if n == 1 and not out[0, 0] > 0:
            raise InputError("a single-zone skim needs an explicit intrazonal value")
        return out
    for i in range(n):
        if out[i, i] > 0 and np.isfinite(out[i, i]):
            continue
        others = np.delete(out[i], i)
        others = others[np.isfinite(others) & (others > 0)]
        if others.size == 0:
            raise InputError(f"zone row {i} has no positive off-diagonal skim to derive an intrazonal value")
        out[i, i] = share * others.min()
    return out
