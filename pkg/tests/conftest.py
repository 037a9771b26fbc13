import numpy as np
import pytest

from geomod.formbank import builtin_letters
from geomod.modgroup import GAMMA0_11, GAMMA2


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path_factory, monkeypatch):
    monkeypatch.setenv("GEOMOD_CACHE", str(tmp_path_factory.getbasetemp() / "loop-cache"))


@pytest.fixture(scope="session")
def g11_letters():
    return builtin_letters(GAMMA0_11)


@pytest.fixture(scope="session")
def g2_letters():
    return builtin_letters(GAMMA2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
