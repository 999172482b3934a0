"""Command-line entry point: ``netappraisal <command> [options]``.

Exit codes: 0 success, 1 input error, 2 non-convergence, 3 internal error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .appraise import UnitValues, compare_scenarios, dumps_json, read_ledger, summary
from .assign import AssignmentOptions, frank_wolfe, read_demand, write_flows
from .demand import write_matrix_csv
from .errors import ConvergenceError, DefectError, InputError, UnreachableError
from .netgraph import apply_scenario, read_network, validate_network
from .pipeline import RunConfig, build_demand, emit_reports, load_config, load_inputs, run_horizon, simulate_year

log = logging.getLogger("netappraisal")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CONVERGED = 2
EXIT_INTERNAL = 3


class _NotConverged(Exception):
    pass


def _common(p: argparse.ArgumentParser, config_required: bool = True) -> None:
    p.add_argument("--config", type=Path, required=config_required, help="TOML run configuration")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--gap", type=float, help="relative gap target for assignment")
    p.add_argument("--max-iters", type=int, dest="max_iters", help="Frank-Wolfe iteration cap")
    p.add_argument("--years", type=int, help="appraisal horizon in years")
    p.add_argument("--rate", type=float, help="discount rate")
    p.add_argument("--scenario", action="append", default=None, help="restrict to this scenario (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netappraisal",
        description="Travel demand, traffic assignment and cost-benefit appraisal of road network upgrades.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="load and check inputs without running anything")
    _common(p)

    p = sub.add_parser("assign", help="user-equilibrium assignment of one network")
    _common(p, config_required=False)
    p.add_argument("--network", type=Path, help="TNTP network file (instead of --config)")
    p.add_argument("--demand", type=Path, help="demand CSV or TNTP trips file, PCE per hour")
    p.add_argument("--year", type=int, default=0, help="demand year when using --config")
    p.add_argument("--phase", choices=("construction", "operation"), default="operation")

    p = sub.add_parser("demand", help="zone data to daily OD matrices per vehicle class")
    _common(p)
    p.add_argument("--year", type=int, default=0)

    p = sub.add_parser("appraise", help="NPV, payback and sensitivity of saved ledgers")
    _common(p, config_required=False)
    p.add_argument("ledgers", nargs="+", type=Path)

    p = sub.add_parser("run", help="full horizon run with reports")
    _common(p)

    p = sub.add_parser("compare", help="rank saved ledgers")
    _common(p, config_required=False)
    p.add_argument("ledgers", nargs="+", type=Path)
    return parser


def _config(args) -> RunConfig:
    config = load_config(args.config)
    return config.with_overrides(
        years=args.years,
        rate=args.rate,
        gap=args.gap,
        max_iterations=args.max_iters,
        output=args.out,
        scenarios=tuple(args.scenario) if args.scenario else None,
    )


def _units(args) -> UnitValues:
    units = _config(args).units if args.config else UnitValues()
    if args.years is not None:
        units = units.with_changes(horizon=args.years)
    if args.rate is not None:
        units = units.with_changes(discount_rate=args.rate)
    return units


def _emit(text: str, out: Path | None, name: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)
    print(out / name)


def cmd_validate(args) -> int:
    inputs = load_inputs(_config(args))
    net = inputs.network
    print(
        f"ok: {len(net.nodes)} nodes, {net.n_links} links, {net.n_zones} zones, "
        f"{len(inputs.scenarios)} scenario(s)"
    )
    return EXIT_OK


def cmd_assign(args) -> int:
    if args.network is not None:
        if args.demand is None:
            raise InputError("--network needs --demand")
        net = read_network(args.network)
        defects = validate_network(net)
        if defects:
            raise DefectError(defects, str(args.network))
        base = AssignmentOptions()
        opts = AssignmentOptions(
            max_iterations=args.max_iters or base.max_iterations,
            relative_gap_target=args.gap or base.relative_gap_target,
        )
        states = {"flows": frank_wolfe(net, read_demand(args.demand, net), opts)}
    else:
        if args.config is None:
            raise InputError("either --config or --network is required")
        config = _config(args)
        inputs = load_inputs(config)
        net = inputs.network
        if inputs.scenarios and args.scenario:
            if len(inputs.scenarios) != 1:
                raise InputError("assign takes at most one --scenario")
            net = apply_scenario(net, inputs.scenarios[0], args.phase)
        run = simulate_year(net, inputs, config, args.year)
        states = {f"flows_{p.name}": s for p, s in zip(config.periods, run.states)}

    out = args.out or Path(".")
    out.mkdir(parents=True, exist_ok=True)
    for name, state in states.items():
        write_flows(net, state, out / f"{name}.csv")
        print(f"{name}: {state.iterations} iterations, gap {state.relative_gap:.3e}")
    if not all(s.converged for s in states.values()):
        raise _NotConverged("assignment did not reach the gap target")
    return EXIT_OK


def cmd_demand(args) -> int:
    config = _config(args)
    inputs = load_inputs(config)
    demand = build_demand(inputs.zones, inputs.skims, config, args.year, inputs.freight)
    out = args.out or config.paths.output
    out.mkdir(parents=True, exist_ok=True)
    zone_ids = inputs.network.zone_ids
    for cls, od in sorted(demand.vehicles.items()):
        write_matrix_csv(out / f"vehicles_{cls}.csv", od, zone_ids, "vehicles_per_day")
    write_matrix_csv(out / "pce.csv", demand.pce, zone_ids, "pce_per_day")
    print(f"year {args.year}: {float(np.sum(demand.pce)):.1f} PCE trips/day written to {out}")
    return EXIT_OK


def cmd_appraise(args) -> int:
    units = _units(args)
    reports = [summary(read_ledger(p), units) for p in args.ledgers]
    _emit(dumps_json(reports if len(reports) > 1 else reports[0]), args.out, "appraisal.json")
    return EXIT_OK


def cmd_compare(args) -> int:
    units = _units(args)
    comp = compare_scenarios([read_ledger(p) for p in args.ledgers], units.discount_rate)
    if args.out is not None:
        data = {
            "discount_rate": units.discount_rate,
            "ranking": [vars(s) for s in comp.ranking],
            "npv_ratio": {f"{a}/{b}": v for (a, b), v in sorted(comp.npv_ratio.items())},
        }
        _emit(dumps_json(data), args.out, "comparison.json")
        return EXIT_OK
    print(f"{'rank':>4}  {'scenario':<24} {'npv':>16} {'payback':>8} {'b/c':>8}")
    for k, s in enumerate(comp.ranking, start=1):
        payback = "-" if s.payback_year is None else str(s.payback_year)
        bc = "-" if s.bc_ratio is None else f"{s.bc_ratio:.3f}"
        print(f"{k:>4}  {s.name:<24} {s.npv:>16.2f} {payback:>8} {bc:>8}")
    return EXIT_OK


def cmd_run(args) -> int:
    config = _config(args)
    result = run_horizon(config)
    manifest = emit_reports(result, config.paths.output)
    print(f"{len(manifest)} report files written to {config.paths.output}")
    for s in result.scenarios:
        print(f"  {s.ledger.name}: npv {summary(s.ledger, config.units)['npv']:.2f}")
    if not result.converged:
        raise _NotConverged("one or more assignments did not reach the gap target")
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "assign": cmd_assign,
    "demand": cmd_demand,
    "appraise": cmd_appraise,
    "run": cmd_run,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (InputError, UnreachableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConvergenceError, _NotConverged) as exc:
        print(f"not converged: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
