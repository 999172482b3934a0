"""Zone attributes and the trip generation / attraction regressions."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, fields
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from ..errors import InputError

log = logging.getLogger(__name__)

PURPOSES = ("work", "education", "buy", "entertainment", "non-home-base")

ZONE_FIELDS = (
    "P", "VP", "ER", "STR", "STUR", "EMPE", "SHOP", "ST", "STU", "HOSPB", "PARK",
    "DRA", "DB", "DT", "DQ", "DF", "DR", "D128", "D444", "DIST",
)  # fmt: skip
COVARIATES = ("DRA", "DB", "DT", "DQ", "DF", "DR", "D128", "D444")


@dataclass(frozen=True)
class ZoneAttributes:
    """Socio-economic description of one traffic zone.

    P population; VP cars per capita; ER resident employment; STR / STUR
    resident school / university students; EMPE jobs at workplaces; SHOP
    shops; ST / STU school / university places; HOSPB hospital beds; PARK
    parks; DRA restricted-traffic-plan flag; DB, DT, DQ, DF, DR, D128, D444
    landmark flags; DIST distance term in km.
    """

    P: float = 0.0
    VP: float = 0.0
    ER: float = 0.0
    STR: float = 0.0
    STUR: float = 0.0
    EMPE: float = 0.0
    SHOP: float = 0.0
    ST: float = 0.0
    STU: float = 0.0
    HOSPB: float = 0.0
    PARK: float = 0.0
    DRA: float = 0.0
    DB: float = 0.0
    DT: float = 0.0
    DQ: float = 0.0
    DF: float = 0.0
    DR: float = 0.0
    D128: float = 0.0
    D444: float = 0.0
    DIST: float = 0.0

    def defects(self) -> list[str]:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                out.append(f"{f.name} must be finite, got {v}")
            elif f.name in COVARIATES and v not in (0.0, 1.0):
                out.append(f"{f.name} is a 0/1 covariate, got {v}")
            elif v < 0:
                out.append(f"{f.name} must be >= 0, got {v}")
        return out

    def grown(self, factors: Mapping[str, float]) -> "ZoneAttributes":
        """Copy with named attributes multiplied by ``factors``."""
        if not factors:
            return self
        return ZoneAttributes(**{f.name: getattr(self, f.name) * factors.get(f.name, 1.0) for f in fields(self)})


# Regressions map a product term ("VP*ER") to its coefficient, in trips/day.
Regression = Mapping[str, float]

PRODUCTION_MODELS: Mapping[str, Regression] = MappingProxyType({
    "work": {"VP*ER": 0.569, "ER": 1.107},
    "education": {"VP*STR": 3.070, "STUR": 0.903, "DIST*P": 0.020},
    "buy": {"P": 0.061, "VP*P": 0.414},
    "entertainment": {"P": 0.073, "VP*P": 0.373},
    "non-home-base": {"EMPE": 0.490, "VP*SHOP": 10.213, "DB": 14485.0, "DQ": 951.0},
})  # fmt: skip

ATTRACTION_MODELS: Mapping[str, Regression] = MappingProxyType({
    "work": {"EMPE": 1.620, "SHOP": 2.420, "DB": 62694.0},
    "education": {"VP*ST": 3.833, "STU": 0.500, "DT": 26789.0, "D128": 9299.0},
    "buy": {
        "VP*SHOP": 15.760, "EMPE": 0.195, "HOSPB": 0.825, "DB": 15456.0, "DQ": 3469.0,
        "DF": 7474.0, "D444": 4607.0, "SHOP*DRA": -0.889,
    },
    "entertainment": {
        "PARK": 122.140, "P": 0.040, "VP*SHOP": 7.364, "EMPE": 0.304, "DR": 4098.0,
        "DF": 1937.0, "DQ": 1532.0, "SHOP*DRA": -0.279, "EMPE*DRA": -0.208,
    },
    "non-home-base": {"EMPE": 0.458, "VP*SHOP": 11.526, "DB": 11706.0, "DQ": 1173.0},
})  # fmt: skip


def term_factors(term: str) -> tuple[str, ...]:
    names = tuple(t.strip() for t in term.split("*"))
    for name in names:
        if name not in ZONE_FIELDS:
            raise InputError(f"unknown zone attribute {name!r} in term {term!r}")
    return names


def evaluate_regression(model: Regression, values: Mapping[str, float | np.ndarray]):
    total = 0.0
    for term, coef in model.items():
        prod = coef
        for name in term_factors(term):
            prod = prod * values[name]
        total = total + prod
    return total


def _lookup(models: Mapping[str, Regression], purpose: str) -> Regression:
    try:
        return models[purpose]
    except KeyError:
        raise ValueError(f"unknown trip purpose {purpose!r}; expected one of {PURPOSES}") from None


def _clamped(value: float, what: str) -> float:
    if value < 0:
        log.warning("negative %s %.3f clamped to 0", what, value)
        return 0.0
    return float(value)


def trip_production(z: ZoneAttributes, purpose: str, models: Mapping[str, Regression] = PRODUCTION_MODELS) -> float:
    """Daily trips produced by zone ``z`` for ``purpose``; negative results clamp to 0."""
    raw = evaluate_regression(_lookup(models, purpose), z.__dict__)
    return _clamped(raw, f"{purpose} production")


def trip_attraction(z: ZoneAttributes, purpose: str, models: Mapping[str, Regression] = ATTRACTION_MODELS) -> float:
    """Daily trips attracted to zone ``z`` for ``purpose``; negative results clamp to 0."""
    raw = evaluate_regression(_lookup(models, purpose), z.__dict__)
    return _clamped(raw, f"{purpose} attraction")


@dataclass(frozen=True)
class TripEnds:
    productions: np.ndarray
    attractions: np.ndarray
    purpose: str

    def __post_init__(self):
        if self.purpose not in PURPOSES:
            raise ValueError(f"unknown trip purpose {self.purpose!r}")
        p = np.asarray(self.productions, dtype=float)
        a = np.asarray(self.attractions, dtype=float)
        if np.any(p < 0) or np.any(a < 0):
            raise InputError("trip ends must be non-negative")
        object.__setattr__(self, "productions", p)
        object.__setattr__(self, "attractions", a)


def trip_ends(
    zones: Sequence[ZoneAttributes],
    purpose: str,
    production_models: Mapping[str, Regression] = PRODUCTION_MODELS,
    attraction_models: Mapping[str, Regression] = ATTRACTION_MODELS,
) -> TripEnds:
    return TripEnds(
        np.array([trip_production(z, purpose, production_models) for z in zones]),
        np.array([trip_attraction(z, purpose, attraction_models) for z in zones]),
        purpose,
    )


def balance_attractions(ends: TripEnds) -> TripEnds:
    """Scale attractions uniformly so their total equals total productions."""
    total_p = float(ends.productions.sum())
    total_a = float(ends.attractions.sum())
    if total_a == 0:
        if total_p > 0:
            raise InputError(f"{ends.purpose}: productions {total_p:.3f} but no attraction mass")
        return ends
    if total_p == total_a:
        return ends
    return TripEnds(ends.productions, ends.attractions * (total_p / total_a), ends.purpose)
