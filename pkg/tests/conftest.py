import os

import pytest
from hypothesis import HealthCheck, settings

import acceptance_log
from bhcd import karate_paths
from bhcd.graph import load_edge_list, load_labels

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def karate():
    e, lab = karate_paths()
    g = load_edge_list(e)
    return g, load_labels(lab, g)


def pytest_terminal_summary(terminalreporter):
    if acceptance_log.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.lines():
            terminalreporter.write_line(line)
