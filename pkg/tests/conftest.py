import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from agnorm.groups import build_group


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def s3():
    return build_group("symmetric:3")


@pytest.fixture(scope="session")
def d8():
    return build_group("dihedral:8")


@pytest.fixture(scope="session")
def q8():
    return build_group("quaternion:8")


@pytest.fixture(scope="session")
def c12():
    return build_group("cyclic:12")
