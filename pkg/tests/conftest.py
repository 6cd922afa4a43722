import numpy as np
import pytest

from gapfuse.grid import RainGrid

# criterion name -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda s: int(s.split(".")[0])):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_grid(rng, shape=(8, 8), p_valid=0.6, p_wet=0.5, scale=5.0):
    valid = rng.random(shape) < p_valid
    values = np.where(rng.random(shape) < p_wet, rng.exponential(scale, shape), 0.0)
    return RainGrid.from_array(values, valid)


@pytest.fixture
def make_grid(rng):
    def make(shape=(8, 8), p_valid=0.6, p_wet=0.5, scale=5.0):
        return random_grid(rng, shape, p_valid, p_wet, scale)

    return make
