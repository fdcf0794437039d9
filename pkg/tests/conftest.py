from pathlib import Path

import numpy as np
import pytest

from overlaymap.registry import load_registry
from overlaymap.synthetic import block_citation_matrix, block_registry

GOLDEN = Path(__file__).parent / "golden"

_acceptance: list[tuple[str, str]] = []


@pytest.fixture
def golden():
    return GOLDEN


@pytest.fixture
def golden_registry():
    return load_registry(GOLDEN / "registry.tsv")


@pytest.fixture(scope="session")
def desk_inputs():
    sizes = [10, 10, 10]
    return block_registry(sizes), block_citation_matrix(sizes, seed=1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  {name}")
