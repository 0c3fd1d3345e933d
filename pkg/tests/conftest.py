import csv
from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).parent / "fixtures"


def load_table(name):
    with open(FIXTURES / f"{name}.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    col = lambda k: np.array([float(r[k]) for r in rows])
    X = np.column_stack([np.ones(len(rows)), col("probit_w1"), col("e1"), col("e2")])
    return X, col("probit_w2")


@pytest.fixture
def chess_classical():
    return load_table("chess_classical")


@pytest.fixture
def ludo_experimental():
    return load_table("ludo_experimental")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)



def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if not LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(LINES, key=str):
        for line in LINES[key]:
            terminalreporter.write_line(line)
