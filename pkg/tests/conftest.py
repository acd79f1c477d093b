import numpy as np
import pytest

from gatecap.qalg import BipartiteGate, StateVector, haar_random_state, haar_random_unitary

_criteria = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion identifier")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    label = dict(report.user_properties).get("criterion")
    if label:
        _criteria.append((label, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in _criteria:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {label}")


@pytest.fixture
def criterion(record_property):
    def mark(label):
        record_property("criterion", label)
    return mark


def random_gate(seed, dims=(2, 2)):
    return BipartiteGate(haar_random_unitary(dims[0] * dims[1], seed), dims, f"haar{seed}")


def random_state(seed, layout):
    n = int(np.prod([d for _, d in layout]))
    return StateVector(haar_random_state(n, seed), layout)
