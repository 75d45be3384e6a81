import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import hjgraph as hj  # noqa: E402


@pytest.fixture(scope="session")
def interval200():
    return hj.build_interval(200, 1.0)


@pytest.fixture(scope="session")
def sierpinski2():
    return hj.build_sierpinski(2)


@pytest.fixture(scope="session")
def sierpinski3():
    return hj.build_sierpinski(3)
