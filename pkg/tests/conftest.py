import numpy as np
import pytest

from wavecgh import build_luts, make_scene


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def scene16():
    return make_scene(plane_size=16)


@pytest.fixture(scope="session")
def luts16(scene16):
    return build_luts(scene16)


@pytest.fixture(scope="session")
def scene64():
    return make_scene(plane_size=64)


@pytest.fixture(scope="session")
def luts64(scene64):
    return build_luts(scene64)


_VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Print and remember one PASS/FAIL line; returns the boolean for asserting."""

    def record(criterion, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {criterion}: {detail}"
        print(line)
        request.config.stash.setdefault(_VERDICTS, []).append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
