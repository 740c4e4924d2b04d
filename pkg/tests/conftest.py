import math

import pytest
from hypothesis import HealthCheck, settings

from hystoc import Hypothesis, NBestList

settings.register_profile("default", deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_RESULTS = []


@pytest.fixture
def worked_nbest():
    return NBestList("u1", (
        Hypothesis(("A", "B", "C"), math.log(0.7)),
        Hypothesis(("A", "B"), math.log(0.2)),
        Hypothesis(("A", "C"), math.log(0.1)),
    ))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
