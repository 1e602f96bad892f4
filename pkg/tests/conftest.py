from __future__ import annotations

import pathlib

import pytest

from catc.airport import load_airport

FIXTURE_DIR = pathlib.Path(__file__).resolve().parents[1] / "src" / "catc" / "fixtures"
GOLDEN_DIR = pathlib.Path(__file__).resolve().parent / "golden"


def fixture_path(name: str) -> pathlib.Path:
    return FIXTURE_DIR / name


def fixture_text(name: str) -> str:
    return fixture_path(name).read_text()


@pytest.fixture(scope="session")
def hamburg():
    return load_airport(fixture_text("hamburg_ne.airport"))


@pytest.fixture(scope="session")
def straight():
    return load_airport(fixture_text("straight.airport"))


@pytest.fixture(scope="session")
def straight_mlu():
    return load_airport(fixture_text("straight_mlu.airport"))


@pytest.fixture(scope="session")
def crossing():
    return load_airport(fixture_text("crossing.airport"))


# One line per acceptance criterion in the summary, fed by the outcome
# of the matching test in test_acceptance.py.
ACCEPTANCE_CRITERIA = {
    "test_oracle_equivalence": "oracle equivalence on >=1000 generated worlds, zero tolerance, <10s",
    "test_taxonomy_coverage": "all 10 conflict types plus documented non-conflicts, byte-exact golden logs",
    "test_lifecycle_lup_tof": "line-up/take-off conflict raised and resolved at the derived ticks",
    "test_lifecycle_lnd_lnd": "intersecting-runway landing conflict raised and resolved at the derived ticks",
    "test_conditional_upgrade_timing": "conditional clearance upgrades at the first safe tick and no earlier",
    "test_probe_soundness": "probe verdicts match hypothetical detection on 10000 triples, world untouched",
    "test_determinism": "every fixture scenario replays byte-identically",
    "test_cli_only": "full run available through the command line alone",
}

_acceptance_results: dict[str, bool] = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    name = report.nodeid.split("::")[-1].split("[")[0]
    if name in ACCEPTANCE_CRITERIA:
        _acceptance_results[name] = _acceptance_results.get(name, True) and report.passed


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for key, label in ACCEPTANCE_CRITERIA.items():
        if key in _acceptance_results:
            status = "PASS" if _acceptance_results[key] else "FAIL"
        else:
            status = "NOT RUN"
        terminalreporter.write_line(f"{status:8s}{label}")
