import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

DEMO_DIR = Path(__file__).resolve().parent.parent / "demo" / "city9"


@pytest.fixture(scope="session")
def city9_run(tmp_path_factory):
    """One full horizon run of the demo city, shared across modules."""
    from netappraisal.pipeline import emit_reports, load_config, run_horizon

    out = tmp_path_factory.mktemp("city9")
    config = load_config(DEMO_DIR / "config.toml").with_overrides(output=out)
    result = run_horizon(config)
    manifest = emit_reports(result, out)
    return config, result, manifest, out


_ACCEPTANCE: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.outcome != "passed":
        prev = _ACCEPTANCE.get(name)
        if prev != "FAIL":
            _ACCEPTANCE[name] = "PASS" if report.outcome == "passed" else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        number, _, label = name.removeprefix("test_criterion_").partition("_")
        terminalreporter.write_line(f"criterion {int(number):>2} {label.replace('_', ' '):<32} {_ACCEPTANCE[name]}")
