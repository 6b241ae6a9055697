"""Shared helpers for the test suite."""

import numpy as np
import pytest

from cebound import random_block_state

ACCEPTANCE_LINES = []


def random_states(count, dims, seed, ensemble="ginibre", **kwargs):
    """Deterministic stream of random BlockStates cycling over dim pairs."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        dp = int(rng.choice(dims))
        dq = int(rng.choice(dims))
        out.append(
            random_block_state(dp, dq, seed + 1000 * i, ensemble, **kwargs)
        )
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
