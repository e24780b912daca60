import numpy as np
import pytest

from mwmusic.io import parse_scene


@pytest.fixture(scope="session")
def small_scene():
    return parse_scene("table1_small.scene")


@pytest.fixture(scope="session")
def extended_scene():
    return parse_scene("table1_extended.scene")


@pytest.fixture(scope="session")
def three_scene():
    return parse_scene("three_targets.scene")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS, WARMUP_SECONDS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    terminalreporter.write_line(f"kernel warm-up {WARMUP_SECONDS:.2f} s, excluded from timings")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number][1])
