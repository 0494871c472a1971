import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", help="run long-running searches")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow") or os.environ.get("CARMICHAEL_RUNSLOW"):
        return
    skip = pytest.mark.skip(reason="long-running; use --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(autouse=True)
def _isolated_runs_file(tmp_path, monkeypatch):
    monkeypatch.setenv("CARMICHAEL_RUNS_FILE", str(tmp_path / "runs.jsonl"))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report_criterion():
    def report(number, passed, detail):
        ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}")
        return passed

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
