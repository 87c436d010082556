from __future__ import annotations

import pytest

from sumsetlab.groups import GroupSpec
from sumsetlab.sets import DenseSubset

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def z55():
    return GroupSpec((5, 5))


@pytest.fixture
def z555():
    return GroupSpec((5, 5, 5))


def to_tuples(A: DenseSubset) -> set:
    return {A.group.decode(i) for i in A.indices()}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
