import os

import numpy as np
import pytest

from nndbench.codec import construct_code, enumerate_codebook

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def code8():
    return construct_code(8, 4)


@pytest.fixture(scope="session")
def book8(code8):
    return enumerate_codebook(code8)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def pytest_collection_modifyitems(config, items):
    if os.environ.get("NNDBENCH_BUDGET") == "1":
        return
    skip = pytest.mark.skip(reason="wall-clock budget run; set NNDBENCH_BUDGET=1")
    for item in items:
        if "budget" in item.keywords:
            item.add_marker(skip)
