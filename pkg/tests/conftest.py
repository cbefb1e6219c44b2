import random
from pathlib import Path

import pytest

from splitnash.bertrand import BertrandModel

ROOT = Path(__file__).resolve().parent.parent
SPECS = ROOT / "specs"


def asymmetric(step="1/4"):
    return BertrandModel.uniform(1, 2, 4, 4, step, (12, 1, 1))


def symmetric(step="1/4"):
    return BertrandModel.uniform(1, 1, 2, 2, step, (10, 2, 2))


@pytest.fixture
def rng():
    return random.Random(20261014)


@pytest.fixture(scope="session")
def asym_model():
    return asymmetric()


@pytest.fixture(scope="session")
def sym_model():
    return symmetric()
