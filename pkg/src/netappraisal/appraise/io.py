"""Ledger serialisation and report tables."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from pathlib import Path

from ..errors import InputError, ParseError
from .ledger import COMPONENTS, AppraisalLedger, LedgerYear, bc_ratio, cumulative_npv, ledger_npv, payback_year, sensitivity
from .units import UnitValues

YEAR_COLUMNS = (
    "year",
    "time_benefit",
    "fuel_benefit",
    "emission_benefit",
    "accident_benefit",
    "maintenance",
    "net",
    "cumulative_npv",
)
YEAR_FIELDS = (*COMPONENTS, "maintenance")


def _finite_or_none(x):
    if x is None or not math.isfinite(x):
        return None
    return x


def ledger_to_dict(ledger: AppraisalLedger) -> dict:
    def year(y: LedgerYear) -> dict:
        return {k: getattr(y, k) for k in YEAR_FIELDS}

    return {
        "name": ledger.name,
        "currency": ledger.currency,
        "construction": ledger.construction,
        "acquisition": ledger.acquisition,
        "construction_phase": year(ledger.construction_phase),
        "years": [year(y) for y in ledger.years],
    }


def ledger_from_dict(data: dict, source: str = "<ledger>") -> AppraisalLedger:
    try:
        years = tuple(LedgerYear(**{k: float(y[k]) for k in YEAR_FIELDS}) for y in data["years"])
        cp = LedgerYear(**{k: float(data["construction_phase"][k]) for k in YEAR_FIELDS})
        return AppraisalLedger(
            name=str(data["name"]),
            construction_phase=cp,
            years=years,
            construction=float(data.get("construction", 0.0)),
            acquisition=float(data.get("acquisition", 0.0)),
            currency=str(data.get("currency", "USD")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{source}: malformed ledger ({exc})") from None


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_ledger(path: str | os.PathLike, ledger: AppraisalLedger) -> None:
    Path(path).write_text(dumps_json(ledger_to_dict(ledger)))


def read_ledger(path: str | os.PathLike) -> AppraisalLedger:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path, exc.lineno, exc.colno) from None
    return ledger_from_dict(data, str(path))


def year_rows(ledger: AppraisalLedger, r: float) -> list[dict]:
    """Benefit-positive yearly series; year 0 carries capital in ``net``."""
    cum = cumulative_npv(ledger.initial_cost, ledger.cash_flows(), r)
    rows = []
    for k, y in enumerate((ledger.construction_phase, *ledger.years)):
        net = -ledger.initial_cost if k == 0 else -y.total
        row = {"year": k}
        row.update({f"{c}_benefit": -getattr(y, c) + 0.0 for c in COMPONENTS})
        row.update(maintenance=y.maintenance, net=net + 0.0, cumulative_npv=cum[k])
        rows.append(row)
    return rows


def year_table_csv(ledger: AppraisalLedger, r: float) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(YEAR_COLUMNS)
    for row in year_rows(ledger, r):
        w.writerow([row["year"], *(repr(float(row[c])) for c in YEAR_COLUMNS[1:])])
    return buf.getvalue()


def summary(ledger: AppraisalLedger, unit: UnitValues, r: float | None = None) -> dict:
    """NPV, payback, B/C and sensitivity shares for one ledger."""
    r = unit.discount_rate if r is None else r
    try:
        shares = sensitivity(ledger, unit.with_changes(discount_rate=r))
    except InputError:
        shares = None
    return {
        "name": ledger.name,
        "currency": ledger.currency,
        "discount_rate": r,
        "horizon": ledger.horizon,
        "capital": ledger.capital,
        "initial_cost": ledger.initial_cost,
        "npv": ledger_npv(ledger, r),
        "payback_year": payback_year(ledger.initial_cost, ledger.cash_flows(), r),
        "bc_ratio": _finite_or_none(bc_ratio(ledger, r)),
        "sensitivity_shares": shares,
        "construction_phase_total": ledger.construction_phase.total,
    }
