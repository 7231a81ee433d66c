import random

import pytest

from fnfdso.field import Field


@pytest.fixture
def field101():
    return Field(101)


@pytest.fixture
def rng():
    return random.Random(0xF00D)


def make_rng(seed):
    return random.Random(seed)
