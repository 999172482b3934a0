import json

import pytest

from fixtures import LINK_ROWS, ZONE_HEADER, write_fixture
from netappraisal.cli import EXIT_INPUT, EXIT_NOT_CONVERGED, EXIT_OK, build_parser, main

SCENARIOS = {
    "wider": "name = wider\n[operation]\nset 1 2 capacity 1800\nset 2 1 capacity 1800\n[costs]\nconstruction = 0.2\n",
    "slower": "name = slower\n[construction]\nset 1 2 capacity 600\n[costs]\nconstruction = 0.1\n",
}


@pytest.fixture
def config_path(tmp_path):
    return write_fixture(tmp_path / "fx", scenarios=SCENARIOS)


def test_parser_has_every_command():
    parser = build_parser()
    for cmd in ("validate", "assign", "demand", "appraise", "run", "compare"):
        args = parser.parse_args([cmd, "--config", "c.toml"] + (["x.json"] if cmd in ("appraise", "compare") else []))
        assert args.command == cmd


def test_scenario_flag_repeatable():
    args = build_parser().parse_args(["run", "--config", "c", "--scenario", "a", "--scenario", "b"])
    assert args.scenario == ["a", "b"]


def test_validate_ok(config_path, capsys):
    assert main(["validate", "--config", str(config_path)]) == EXIT_OK
    assert "2 zones" in capsys.readouterr().out


def test_validate_input_error(tmp_path, capsys):
    cfg = write_fixture(tmp_path, zone_header=ZONE_HEADER.replace(",VP,", ",VQ,"))
    assert main(["validate", "--config", str(cfg)]) == EXIT_INPUT
    assert "VP" in capsys.readouterr().err


def test_missing_config_is_input_error(tmp_path):
    assert main(["validate", "--config", str(tmp_path / "none.toml")]) == EXIT_INPUT


def test_run_writes_reports(config_path, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--config", str(config_path), "--out", str(out), "--years", "2", "--rate", "0.05"]) == EXIT_OK
    summary = json.loads((out / "summary.json").read_text())
    assert summary["horizon"] == 2
    assert summary["discount_rate"] == 0.05
    assert set(summary["scenarios"]) == {"wider", "slower"}
    manifest = json.loads((out / "manifest.json").read_text())
    assert "scenarios/wider/years.csv" in manifest


def test_run_selected_scenario(config_path, tmp_path):
    out = tmp_path / "out"
    assert main(["run", "--config", str(config_path), "--out", str(out), "--years", "1", "--scenario", "wider"]) == EXIT_OK
    summary = json.loads((out / "summary.json").read_text())
    assert list(summary["scenarios"]) == ["wider"]
    assert summary["comparison"] is None


def test_run_nonconvergence_exit_code(tmp_path):
    links = [*LINK_ROWS, "1 2 400.0 5.0 7.0 0.15 4.0 1.0 ;"]
    cfg = write_fixture(tmp_path / "fx", links=links, scenarios=SCENARIOS)
    args = ["run", "--config", str(cfg), "--out", str(tmp_path / "o"), "--years", "1"]
    assert main([*args, "--max-iters", "1", "--gap", "1e-12"]) == EXIT_NOT_CONVERGED
    assert (tmp_path / "o" / "summary.json").exists()


def test_appraise_and_compare(config_path, tmp_path, capsys):
    out = tmp_path / "out"
    main(["run", "--config", str(config_path), "--out", str(out), "--years", "2"])
    capsys.readouterr()
    ledgers = [str(out / "scenarios" / n / "ledger.json") for n in ("wider", "slower")]

    assert main(["appraise", ledgers[0], "--rate", "0.08"]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    saved = json.loads((out / "summary.json").read_text())["scenarios"]["wider"]
    assert report["npv"] == saved["npv"]

    assert main(["compare", *ledgers, "--out", str(tmp_path / "cmp")]) == EXIT_OK
    cmp = json.loads((tmp_path / "cmp" / "comparison.json").read_text())
    assert [r["name"] for r in cmp["ranking"]] == saved_ranking(out)


def saved_ranking(out):
    return json.loads((out / "summary.json").read_text())["comparison"]["ranking"]


def test_compare_needs_two_ledgers(config_path, tmp_path):
    out = tmp_path / "out"
    main(["run", "--config", str(config_path), "--out", str(out), "--years", "1"])
    assert main(["compare", str(out / "scenarios" / "wider" / "ledger.json")]) == EXIT_INPUT


def test_demand_writes_matrices(config_path, tmp_path):
    out = tmp_path / "dm"
    assert main(["demand", "--config", str(config_path), "--out", str(out), "--year", "1"]) == EXIT_OK
    assert (out / "pce.csv").read_text().startswith("origin,dest,pce_per_day\n")
    assert (out / "vehicles_car.csv").exists()


def test_assign_from_network_and_demand(tmp_path, capsys):
    write_fixture(tmp_path)
    demand = tmp_path / "od.csv"
    demand.write_text("origin,dest,pce_per_hour\n1,2,500\n2,1,300\n")
    out = tmp_path / "as"
    code = main(["assign", "--network", str(tmp_path / "network.tntp"), "--demand", str(demand), "--out", str(out)])
    assert code == EXIT_OK
    rows = (out / "flows.csv").read_text().splitlines()
    assert rows[0] == "from,to,flow,time,v_over_c"
    assert float(rows[1].split(",")[2]) == pytest.approx(500.0)


def test_assign_scenario_from_config(config_path, tmp_path):
    out = tmp_path / "as"
    code = main(["assign", "--config", str(config_path), "--scenario", "wider", "--out", str(out)])
    assert code == EXIT_OK
    assert sorted(p.name for p in out.iterdir()) == ["flows_am.csv", "flows_offpeak.csv", "flows_pm.csv"]
