"""Nested-logit mode choice and the transit-diversion curve.

Utilities are linear in skim variables. ``mode_utility`` and
``mode_shares`` accept scalars or equally shaped numpy arrays (one cell
per zone pair), so the same code serves single lookups and whole matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping, Sequence

import numpy as np

from ..errors import InputError
from .tripends import PURPOSES

SKIM_VARIABLES = ("TIMCAR", "TIMMOT", "TIMTAX", "TIMBIN", "TIMBOT", "DIST", "OWNCAR", "OWNMOT", "DESFLAG")
CONSTANT = "const"

# Linear utility coefficients per purpose and mode.
UTILITY_TABLES: Mapping[str, Mapping[str, Mapping[str, float]]] = MappingProxyType({
    "work": {
        "car": {CONSTANT: 0.697568, "TIMCAR": -0.034575, "OWNCAR": 9.008179, "DESFLAG": -0.588848},
        "motorcycle": {CONSTANT: -0.480759, "TIMMOT": -0.047222, "OWNMOT": 18.345253},
        "bus": {CONSTANT: 0.330393, "TIMBIN": -0.020389, "TIMBOT": -0.026496},
        "taxi": {"TIMTAX": -0.048415, "OWNCAR": 3.100169},
    },
    "education": {
        "bus": {CONSTANT: 0.8811690, "TIMBIN": -0.012004, "TIMBOT": -0.012004},
        "taxi": {CONSTANT: -0.0365572, "TIMTAX": -0.030786, "OWNCAR": 8.253327},
        "car": {CONSTANT: -1.1044833, "TIMCAR": -0.041592, "OWNCAR": 11.324764, "DESFLAG": -0.582493},
        "minibus": {"DIST": -1.104768, "OWNCAR": 6.648515},
    },
    "buy": {
        "bus": {CONSTANT: 2.794484, "TIMBIN": -0.013595, "TIMBOT": -0.015329},
        "taxi": {CONSTANT: 1.967395, "TIMTAX": -0.037180, "OWNCAR": 6.596312},
        "car": {"TIMCAR": -0.015029, "OWNCAR": 12.443686, "DESFLAG": -0.689367},
    },
    "entertainment": {
        "bus": {CONSTANT: 2.725886, "TIMBIN": -0.009414, "TIMBOT": -0.009414},
        "taxi": {CONSTANT: 2.393202, "TIMTAX": -0.033543, "OWNCAR": 5.379732},
        "car": {"TIMCAR": -0.015111, "OWNCAR": 13.957626, "DESFLAG": -0.374195},
    },
    "non-home-base": {
        "bus": {CONSTANT: 0.039002, "TIMBIN": -0.008689, "TIMBOT": -0.041852},
        "taxi": {CONSTANT: 0.334293, "TIMTAX": -0.020176},
        "car": {"TIMCAR": -0.012662, "DESFLAG": -0.705396},
    },
})  # fmt: skip


@dataclass(frozen=True)
class Nest:
    members: tuple[str, ...]
    theta: float = 1.0


@dataclass(frozen=True)
class ChoiceModel:
    """Utility specification and nest structure for one trip purpose.

    Modes not listed in any nest are elemental alternatives at the top level.
    """

    purpose: str
    utilities: Mapping[str, Mapping[str, float]]
    nests: Mapping[str, Nest] = field(default_factory=dict)

    def __post_init__(self):
        seen: set[str] = set()
        for name, nest in self.nests.items():
            if not 0 < nest.theta <= 1:
                raise InputError(f"nest {name!r}: theta must be in (0, 1], got {nest.theta}")
            if not nest.members:
                raise InputError(f"nest {name!r} has no members")
            for m in nest.members:
                if m not in self.utilities:
                    raise InputError(f"nest {name!r} member {m!r} has no utility")
                if m in seen:
                    raise InputError(f"mode {m!r} belongs to more than one nest")
                seen.add(m)
            if name in self.utilities:
                raise InputError(f"nest name {name!r} clashes with a mode")
        for mode, coefs in self.utilities.items():
            for var in coefs:
                if var != CONSTANT and var not in SKIM_VARIABLES:
                    raise InputError(f"{self.purpose}/{mode}: unknown variable {var!r}")

    @property
    def modes(self) -> tuple[str, ...]:
        return tuple(self.utilities)


def default_model(purpose: str, theta: float = 1.0) -> ChoiceModel:
    """Built-in coefficients; the work purpose nests bus and taxi."""
    if purpose not in UTILITY_TABLES:
        raise ValueError(f"unknown trip purpose {purpose!r}; expected one of {PURPOSES}")
    nests = {"transit": Nest(("bus", "taxi"), theta)} if purpose == "work" else {}
    return ChoiceModel(purpose, {m: dict(c) for m, c in UTILITY_TABLES[purpose].items()}, nests)


def mode_utility(model: ChoiceModel, mode: str, skims: Mapping[str, float | np.ndarray]):
    try:
        coefs = model.utilities[mode]
    except KeyError:
        raise InputError(f"{model.purpose}: no utility for mode {mode!r}") from None
    u = coefs.get(CONSTANT, 0.0)
    for var, beta in coefs.items():
        if var == CONSTANT:
            continue
        if var not in skims:
            raise InputError(f"{model.purpose}/{mode}: missing skim variable {var!r}")
        u = u + beta * skims[var]
    return u


def nest_logsum(utilities: Sequence[float], theta: float) -> float:
    """theta * ln(sum(exp(u))), evaluated with a max shift."""
    if len(utilities) == 0:
        raise ValueError("logsum of an empty nest")
    if not 0 < theta <= 1:
        raise ValueError(f"theta must be in (0, 1], got {theta}")
    top = max(utilities)
    return theta * (top + math.log(math.fsum(math.exp(u - top) for u in utilities)))


def _logsumexp(stack: np.ndarray) -> np.ndarray:
    top = stack.max(axis=0)
    return top + np.log(np.exp(stack - top).sum(axis=0))


def mode_shares(model: ChoiceModel, utilities: Mapping[str, float | np.ndarray]) -> dict:
    """Nested-logit choice probabilities per mode.

    The top level is a multinomial logit over elemental modes and nests; a
    nest enters with inclusive value theta * ln(sum(exp(U_k / theta))) and
    splits internally with probabilities proportional to exp(U_k / theta).
    With theta = 1 everywhere this is the flat multinomial logit.
    """
    missing = [m for m in model.modes if m not in utilities]
    if missing:
        raise InputError(f"{model.purpose}: no utility supplied for {missing}")
    scalar = all(np.ndim(utilities[m]) == 0 for m in model.modes)
    u = {m: np.asarray(utilities[m], dtype=float) for m in model.modes}
    shape = np.broadcast_shapes(*(v.shape for v in u.values()))
    u = {m: np.broadcast_to(v, shape) for m, v in u.items()}

    nested = {m: name for name, nest in model.nests.items() for m in nest.members}
    top_names: list[str] = []
    top_values: list[np.ndarray] = []
    within: dict[str, np.ndarray] = {}
    for m in model.modes:
        if m not in nested:
            top_names.append(m)
            top_values.append(u[m])
    for name, nest in model.nests.items():
        scaled = np.stack([u[m] / nest.theta for m in nest.members])
        inclusive = _logsumexp(scaled)
        top_names.append(name)
        top_values.append(nest.theta * inclusive)
        cond = np.exp(scaled - inclusive)
        for k, m in enumerate(nest.members):
            within[m] = cond[k]

    top = np.stack(top_values)
    top_prob = np.exp(top - _logsumexp(top))
    by_name = dict(zip(top_names, top_prob))
    out = {}
    for m in model.modes:
        p = by_name[m] if m not in nested else by_name[nested[m]] * within[m]
        out[m] = float(p) if scalar else p
    return out


@dataclass(frozen=True)
class DeviationParams:
    a: float
    b: float


DEVIATION_PARAMS: Mapping[str, DeviationParams] = MappingProxyType({
    "car": DeviationParams(a=1.559, b=19.198),
    "taxi": DeviationParams(a=4.794, b=2.668),
    "minibus": DeviationParams(a=1.652, b=19.198),
    "bicycle": DeviationParams(a=1.652, b=19.198),
})  # fmt: skip

DiversionCurve = Callable[[DeviationParams, float], float]


def logistic_diversion(params: DeviationParams, delta_cost):
    """Fraction diverted: 1 / (1 + exp(a + b * delta_cost))."""
    z = params.a + params.b * np.asarray(delta_cost, dtype=float)
    with np.errstate(over="ignore"):
        d = 1.0 / (1.0 + np.exp(z))
    return float(d) if np.ndim(d) == 0 else d


def demand_deviation(share, params: DeviationParams, delta_cost, curve: DiversionCurve = logistic_diversion):
    """Part of ``share`` that diverts to public transport under ``curve``."""
    share_arr = np.asarray(share, dtype=float)
    if np.any(share_arr < 0) or np.any(share_arr > 1):
        raise ValueError("share must lie in [0, 1]")
    with np.errstate(invalid="ignore"):
        frac = np.clip(curve(params, delta_cost), 0.0, 1.0)
    out = np.where(share_arr == 0, 0.0, share_arr * frac)
    return float(out) if np.ndim(out) == 0 else out
