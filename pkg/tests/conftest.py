import os

import numpy as np
import pytest

from csit_dof import kernels

BACKENDS = sorted(kernels.BACKENDS)

_criteria: dict[str, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


def pytest_runtest_logreport(report):
    item_marker = getattr(report, "criterion_label", None)
    if item_marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        details = "; ".join(str(v) for k, v in report.user_properties if k == "measured")
        _criteria[report.nodeid] = (item_marker, report.outcome, details)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        rep.criterion_label = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome, details in _criteria.values():
        line = f"{'PASS' if outcome == 'passed' else 'FAIL'}  {label}"
        terminalreporter.write_line(line + (f"  [{details}]" if details else ""))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def no_seed_env(monkeypatch):
    monkeypatch.delenv("CSIT_DOF_SEED", raising=False)
    return os.environ
