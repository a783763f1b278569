import pytest
from hypothesis import HealthCheck, settings

from petersonmap.rootdata import build_root_system

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

RANK2 = [("A", 2), ("B", 2), ("C", 2), ("G", 2)]


@pytest.fixture(params=[("A", 1)] + RANK2, ids=lambda t: f"{t[0]}{t[1]}")
def small_rs(request):
    return build_root_system(*request.param)


_acceptance_key = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_acceptance_key] = []


@pytest.fixture
def acceptance_log(request):
    """Collects the one-line verdict of each acceptance criterion."""
    return request.config.stash[_acceptance_key]


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_acceptance_key, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
