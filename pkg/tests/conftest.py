from __future__ import annotations

import numpy as np
import pytest

from abfrac.discrete import Grid, GridFn

#: lines recorded by the acceptance module, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def grid21() -> Grid:
    return Grid(0, 21)


def random_fn(rng: np.random.Generator, grid: Grid) -> GridFn:
    return GridFn(grid, rng.standard_normal(grid.size))


def pytest_terminal_summary(terminalreporter, exitstatus, config):  # noqa: ARG001
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
