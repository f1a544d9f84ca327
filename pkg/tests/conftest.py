import numpy as np
import pytest
from hypothesis import settings

from mapcert.sampling import SamplingConfig

settings.register_profile("default", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("default")


@pytest.fixture(scope="session")
def cfg():
    return SamplingConfig()


@pytest.fixture(scope="session")
def light_cfg():
    # the budget used by the bundled scenarios
    return SamplingConfig(directions_per_shell=1024, shoot_directions=256, base_points=8)


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
