import numpy as np
import pytest

from lineharp.model import LineSet, Polyline, generate_dataset


@pytest.fixture(scope="session")
def teaser():
    return generate_dataset("teaser", 1)


@pytest.fixture(scope="session")
def overlap():
    return generate_dataset("overlap", 7)


@pytest.fixture(scope="session")
def grid():
    return generate_dataset("grid", 0)


def single_line(points, beta=1.0, line_id=0, label=None):
    return LineSet(lines=[Polyline(line_id, np.asarray(points, float), beta, label)])
