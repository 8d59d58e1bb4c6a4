import numpy as np
import pytest
from dataclasses import replace

from ncisac.config import default_config


@pytest.fixture
def cfg():
    return default_config()


@pytest.fixture
def small_cfg():
    """8 subcarriers, 4 occupied, 4 symbols: small enough for hand-checked layouts."""
    return replace(default_config(), n_subcarriers=8, n_occupied=4, n_symbols=4, kcv_folds=4)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict: ``criterion(label, ok, detail)``.

    The line is printed immediately and repeated in the terminal summary.
    """
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def record(label: str, ok: bool, detail: str = "") -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f": {detail}" if detail else "")
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
