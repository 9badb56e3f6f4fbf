import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bitangential.problem import DataSet

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE: dict[int, str] = {}


def record(criterion: int, ok: bool, detail: str = "") -> None:
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE[criterion] = line
    print(line)


@pytest.fixture
def single_node() -> DataSet:
    """n = 1, A1 = 0, C = col(2, 0, 0, 1), 2x2 blocks, normalization point 1."""
    return DataSet.create([[0.0]], np.zeros((0, 0)), [[2.0], [0.0], [0.0], [1.0]], 2, 2, mu=1.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(2024)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
