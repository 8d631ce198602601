import numpy as np
import pytest

import optomo
from optomo import Probe, find_probes


@pytest.fixture
def example_net():
    return optomo.example_network()


@pytest.fixture
def example_walks(example_net):
    return find_probes(example_net)


@pytest.fixture
def squeezed_plan(example_walks):
    return [Probe(w, "squeezed") for w in example_walks]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = next((m for name, m in sys.modules.items() if name.rsplit(".", 1)[-1] == "test_acceptance"), None)
    got = getattr(mod, "LINES", [])
    if got:
        terminalreporter.section("acceptance criteria")
        for line in got:
            terminalreporter.write_line(line)
