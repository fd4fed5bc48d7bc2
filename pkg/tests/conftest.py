import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # lets test modules import oracles

_acceptance = []


@pytest.fixture(scope="session")
def experiment1_desk_csv(tmp_path_factory):
    """Bundled experiment1 plan at desk scale, run once through the CLI."""
    from bnevac.cli import main

    out = tmp_path_factory.mktemp("exp1") / "experiment1.csv"
    assert main(["sweep", "experiment1.plan", "--desk-scale", "--output", str(out)]) == 0
    return out


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    label = getattr(item.function, "criterion", None)
    if label is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        detail = "; ".join(f"{k}={v}" for k, v in item.user_properties)
        _acceptance.append((label, rep.passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in sorted(_acceptance):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  criterion {label}  {detail}")
