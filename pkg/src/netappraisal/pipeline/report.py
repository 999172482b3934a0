"""Deterministic report files for a horizon run."""

from __future__ import annotations

import csv
import hashlib
import io
import os
from pathlib import Path

from ..appraise import COMPONENTS, AnnualMetrics, dumps_json, ledger_to_dict, summary, year_table_csv
from ..errors import InputError
from .run import STATUS_QUO, HorizonResult

METRIC_COLUMNS = ("year", "network", "vehicle_hours", "vehicle_km", "fuel_liters", "accident_vkt", "converged")


def _metrics_csv(rows: list[tuple[int, str, AnnualMetrics]]) -> str:
    pollutants = sorted({p for _, _, m in rows for p in m.emissions})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([*METRIC_COLUMNS[:5], *(f"{p}_kg" for p in pollutants), *METRIC_COLUMNS[5:]])
    for year, network, m in rows:
        w.writerow(
            [year, network, repr(m.vehicle_hours), repr(m.vehicle_km), repr(m.fuel),
             *(repr(m.emissions.get(p, 0.0)) for p in pollutants), repr(m.accident_vkt), int(m.converged)]
        )  # fmt: skip
    return buf.getvalue()


def report_files(result: HorizonResult) -> dict[str, str]:
    """Relative path to file content for every report, manifest excluded."""
    config = result.config
    r = config.discount_rate
    files: dict[str, str] = {}
    scenario_summaries = {}
    for run in result.scenarios:
        lg = run.ledger
        name = lg.name
        files[f"scenarios/{name}/years.csv"] = year_table_csv(lg, r)
        files[f"scenarios/{name}/ledger.json"] = dumps_json(ledger_to_dict(lg))
        rows = [(0, "construction", run.construction), (0, STATUS_QUO, result.baseline[0])]
        for y, m in enumerate(run.operation, start=1):
            rows += [(y, "operation", m), (y, STATUS_QUO, result.baseline[y])]
        files[f"scenarios/{name}/metrics.csv"] = _metrics_csv(rows)
        s = summary(lg, config.units, r)
        s["component_totals"] = {c: -lg.component_total(c) for c in COMPONENTS}
        s["converged"] = all(m.converged for m in (run.construction, *run.operation))
        scenario_summaries[name] = s
    for name, text in result.flow_tables.items():
        files[f"flows/{name}.csv"] = text

    comparison = None
    if result.comparison is not None:
        comparison = {
            "ranking": [s.name for s in result.comparison.ranking],
            "npv_ratio": {f"{a}/{b}": v for (a, b), v in sorted(result.comparison.npv_ratio.items())},
        }
    files["summary.json"] = dumps_json(
        {
            "currency": config.units.currency,
            "discount_rate": r,
            "horizon": config.horizon,
            "converged": result.converged,
            "scenarios": scenario_summaries,
            "comparison": comparison,
        }
    )
    return files


def emit_reports(result: HorizonResult, out_dir) -> dict[str, str]:
    """Write every report plus ``manifest.json``; return path -> sha256."""
    out = Path(out_dir)
    files = report_files(result)
    manifest = {}
    try:
        out.mkdir(parents=True, exist_ok=True)
        for rel, text in sorted(files.items()):
            target = out / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            data = text.encode("utf-8")
            target.write_bytes(data)
            manifest[rel] = hashlib.sha256(data).hexdigest()
        (out / "manifest.json").write_bytes(dumps_json(manifest).encode("utf-8"))
    except OSError as exc:
        raise InputError(f"cannot write reports to {out}: {exc.strerror or exc}") from None
    if not os.access(out, os.W_OK):
        raise InputError(f"output directory {out} is not writable")
    return manifest
