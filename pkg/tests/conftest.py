import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def disk_grid(k, radius=0.95):
    """``k x k`` Cartesian grid clipped to the open disk of given radius."""
    xs = np.linspace(-radius, radius, k)
    return [complex(x, y) for x in xs for y in xs if abs(complex(x, y)) < radius + 1e-12 and abs(complex(x, y)) < 1]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[key])
